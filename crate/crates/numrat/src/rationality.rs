//! Deciding numerical rationality: positivity of `g(E) = -E^2 + ell(E)` over
//! all nonzero effective exceptional divisors.
//!
//! Two decision paths are provided.  The special-divisor criterion reduces
//! the infinite quantifier to the finite set of special divisors, valid on
//! minimal log terminal graphs when `ell <= 0` on every curve.  The brute
//! force enumerates a box of candidate divisors with a branch-and-bound
//! search whose bound is the exact minimum of the quadratic relaxation, so
//! no candidate below the threshold is ever skipped.

use num_traits::{Signed, Zero};

use crate::adjunction::{g_value, LinearFunctional};
use crate::birational::minimalize;
use crate::cycles::{numerical_cycle, special_divisors};
use crate::discrepancy::is_log_terminal_graph;
use crate::lattice::{rat, Divisor, Rational};
use crate::model::{OrderConfig, ResolutionGraph};
use crate::Error;

/// Decision path that produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Special,
    Bruteforce,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Special => "special",
            Method::Bruteforce => "bruteforce",
        }
    }
}

/// Requested decision path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MethodChoice {
    #[default]
    Auto,
    Special,
    Brute,
}

#[derive(Debug, Clone)]
pub struct CheckOptions {
    pub method: MethodChoice,
    /// Brute-force box: coefficients up to `bound` times the numerical cycle.
    pub bound: i64,
    /// Abort the brute-force search after this many visited nodes.
    pub node_cap: u64,
}

pub const DEFAULT_BOUND: i64 = 4;
pub const DEFAULT_NODE_CAP: u64 = 10_000_000;

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            method: MethodChoice::Auto,
            bound: DEFAULT_BOUND,
            node_cap: DEFAULT_NODE_CAP,
        }
    }
}

/// Outcome of a rationality check.  A `false` verdict always carries a
/// witness divisor with its nonpositive `g` value.  A `true` verdict from
/// the brute force only certifies the searched box; from the special
/// criterion it is a proof, provided the preconditions held.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub rational: bool,
    pub witness: Option<Divisor>,
    pub witness_value: Option<Rational>,
    /// `(r^2/2) * witness_value` when the rank is known (config-level
    /// checks only).
    pub witness_chi: Option<Rational>,
    pub method: Method,
    pub bound_used: Option<i64>,
}

impl Verdict {
    fn rational_via(method: Method, bound_used: Option<i64>) -> Verdict {
        Verdict {
            rational: true,
            witness: None,
            witness_value: None,
            witness_chi: None,
            method,
            bound_used,
        }
    }

    fn counterexample(
        method: Method,
        bound_used: Option<i64>,
        witness: Divisor,
        value: Rational,
    ) -> Verdict {
        Verdict {
            rational: false,
            witness: Some(witness),
            witness_value: Some(value),
            witness_chi: None,
            method,
            bound_used,
        }
    }
}

/// The hypotheses under which the special-divisor criterion is a proof.
pub fn special_preconditions(
    graph: &ResolutionGraph,
    ell: &LinearFunctional,
) -> Result<(), Error> {
    if !is_log_terminal_graph(graph) {
        return Err(Error::Hypothesis(
            "special criterion needs a log terminal graph".into(),
        ));
    }
    for id in graph.vertex_ids() {
        if ell.value_at(&id).is_positive() {
            return Err(Error::Hypothesis(format!(
                "special criterion needs ell <= 0 on every curve; \
                 ell({id}) = {} > 0",
                ell.value_at(&id)
            )));
        }
    }
    for v in graph.vertices() {
        if v.self_intersection == -1 && v.genus == 0 {
            return Err(Error::Hypothesis(format!(
                "special criterion needs a minimal graph; `{}` is a \
                 genus-0 (-1)-curve",
                v.id
            )));
        }
    }
    Ok(())
}

/// Decide positivity of `g` by evaluating it on every special divisor.
/// Sound exactly under `special_preconditions`.
pub fn check_special(
    graph: &ResolutionGraph,
    ell: &LinearFunctional,
) -> Result<Verdict, Error> {
    special_preconditions(graph, ell)?;
    let form = graph.intersection_form();
    for d in special_divisors(graph)? {
        let value = g_value(&form, ell, &d)?;
        if !value.is_positive() {
            return Ok(Verdict::counterexample(Method::Special, None, d, value));
        }
    }
    Ok(Verdict::rational_via(Method::Special, None))
}

/// Decide positivity of `g` over the box of effective divisors with
/// coefficients up to `bound` times the numerical cycle, with the default
/// node cap.
pub fn check_bruteforce(
    graph: &ResolutionGraph,
    ell: &LinearFunctional,
    bound: i64,
) -> Result<Verdict, Error> {
    check_bruteforce_capped(graph, ell, bound, DEFAULT_NODE_CAP)
}

/// As `check_bruteforce` with an explicit cap on visited search nodes.
/// The witness, when one exists in the box, is the lexicographically least
/// counterexample in vertex-id order.
pub fn check_bruteforce_capped(
    graph: &ResolutionGraph,
    ell: &LinearFunctional,
    bound: i64,
    node_cap: u64,
) -> Result<Verdict, Error> {
    if bound < 1 {
        return Err(Error::Input(format!("bound must be >= 1, got {bound}")));
    }
    if graph.is_empty() {
        return Ok(Verdict::rational_via(Method::Bruteforce, Some(bound)));
    }
    let z = numerical_cycle(graph, &graph.vertex_id_set())?;
    let mut ids = graph.vertex_ids();
    ids.sort();
    let n = ids.len();

    let form = graph.intersection_form();
    // a = minus the intersection matrix, positive definite.
    let mut a = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = -form
                .pair(&Divisor::single(&ids[i]), &Divisor::single(&ids[j]))
                .expect("ids come from the graph");
        }
    }
    let ell_vec: Vec<Rational> = ids.iter().map(|id| ell.value_at(id)).collect();
    let bounds: Vec<i64> = ids
        .iter()
        .map(|id| {
            i64::try_from(z.coeff(id).to_integer())
                .map(|c| c * bound)
                .map_err(|_| Error::Internal("cycle coefficient overflows i64".into()))
        })
        .collect::<Result<_, _>>()?;

    // For each suffix start k, the inverse of the suffix principal minor,
    // used for the exact minimum of the relaxed quadratic.
    let mut suffix_inverse: Vec<Vec<Vec<Rational>>> = Vec::with_capacity(n);
    for k in 0..n {
        let m = n - k;
        let sub: Vec<Vec<Rational>> = (0..m)
            .map(|i| (0..m).map(|j| a[k + i][k + j].clone()).collect())
            .collect();
        suffix_inverse.push(invert(sub).ok_or_else(|| {
            Error::Internal("suffix minor of a definite form must be invertible".into())
        })?);
    }

    let mut search = BruteSearch {
        a: &a,
        ell: &ell_vec,
        bounds: &bounds,
        suffix_inverse: &suffix_inverse,
        node_cap,
        visited: 0,
    };
    let mut coeffs = vec![0i64; n];
    match search.dfs(0, &mut coeffs)? {
        Some(hit) => {
            let witness = Divisor::from_int_coeffs(
                ids.iter().cloned().zip(hit.iter().copied()),
            );
            let value = g_value(&form, ell, &witness)?;
            debug_assert!(!value.is_positive());
            Ok(Verdict::counterexample(
                Method::Bruteforce,
                Some(bound),
                witness,
                value,
            ))
        }
        None => Ok(Verdict::rational_via(Method::Bruteforce, Some(bound))),
    }
}

struct BruteSearch<'a> {
    a: &'a [Vec<Rational>],
    ell: &'a [Rational],
    bounds: &'a [i64],
    suffix_inverse: &'a [Vec<Vec<Rational>>],
    node_cap: u64,
    visited: u64,
}

impl BruteSearch<'_> {
    /// Exact `g` of a fully assigned coefficient vector.
    fn g_of(&self, coeffs: &[i64]) -> Rational {
        let n = coeffs.len();
        let mut total = Rational::zero();
        for i in 0..n {
            if coeffs[i] == 0 {
                continue;
            }
            total += self.ell[i].clone() * rat(coeffs[i]);
            for j in 0..n {
                if coeffs[j] != 0 {
                    total += self.a[i][j].clone() * rat(coeffs[i] * coeffs[j]);
                }
            }
        }
        total
    }

    /// Lower bound of `g` over all real completions of the prefix
    /// `coeffs[..depth]`: the exact unconstrained minimum of the quadratic
    /// in the free variables.  Never exceeds the value of any integer
    /// completion inside the box.
    fn relaxed_lower_bound(&self, depth: usize, coeffs: &[i64]) -> Rational {
        let n = coeffs.len();
        let mut prefix = Rational::zero();
        for i in 0..depth {
            if coeffs[i] == 0 {
                continue;
            }
            prefix += self.ell[i].clone() * rat(coeffs[i]);
            for j in 0..depth {
                if coeffs[j] != 0 {
                    prefix += self.a[i][j].clone() * rat(coeffs[i] * coeffs[j]);
                }
            }
        }
        if depth == n {
            return prefix;
        }
        let m = n - depth;
        let mut w = vec![Rational::zero(); m];
        for (jj, w_j) in w.iter_mut().enumerate() {
            let j = depth + jj;
            let mut v = self.ell[j].clone();
            for (i, &c) in coeffs.iter().enumerate().take(depth) {
                if c != 0 {
                    v += rat(2) * self.a[i][j].clone() * rat(c);
                }
            }
            *w_j = v;
        }
        let inv = &self.suffix_inverse[depth];
        let mut correction = Rational::zero();
        for i in 0..m {
            if w[i].is_zero() {
                continue;
            }
            for j in 0..m {
                if !w[j].is_zero() {
                    correction += w[i].clone() * inv[i][j].clone() * w[j].clone();
                }
            }
        }
        prefix - correction / rat(4)
    }

    /// Depth-first search in ascending lexicographic order; returns the
    /// first (hence lex-least) nonzero assignment with `g <= 0`.
    fn dfs(&mut self, depth: usize, coeffs: &mut Vec<i64>) -> Result<Option<Vec<i64>>, Error> {
        self.visited += 1;
        if self.visited > self.node_cap {
            return Err(Error::SearchCap {
                visited: self.visited,
                cap: self.node_cap,
            });
        }
        if depth == coeffs.len() {
            if coeffs.iter().any(|&c| c != 0) && !self.g_of(coeffs).is_positive() {
                return Ok(Some(coeffs.clone()));
            }
            return Ok(None);
        }
        for c in 0..=self.bounds[depth] {
            coeffs[depth] = c;
            if self.relaxed_lower_bound(depth + 1, coeffs).is_positive() {
                coeffs[depth] = 0;
                continue;
            }
            if let Some(hit) = self.dfs(depth + 1, coeffs)? {
                return Ok(Some(hit));
            }
        }
        coeffs[depth] = 0;
        Ok(None)
    }
}

/// Exact inverse of a small rational matrix by Gauss-Jordan elimination.
fn invert(mut m: Vec<Vec<Rational>>) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut inv: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { rat(1) } else { rat(0) }).collect())
        .collect();
    for col in 0..n {
        let pivot_row = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let pivot = m[col][col].clone();
        for j in 0..n {
            m[col][j] /= pivot.clone();
            inv[col][j] /= pivot.clone();
        }
        for row in 0..n {
            if row != col && !m[row][col].is_zero() {
                let factor = m[row][col].clone();
                for j in 0..n {
                    let s = m[col][j].clone() * factor.clone();
                    m[row][j] -= s;
                    let s = inv[col][j].clone() * factor.clone();
                    inv[row][j] -= s;
                }
            }
        }
    }
    Some(inv)
}

/// Full pipeline: validate, contract to the minimal configuration, build
/// the canonical functional there, decide by the requested method, and
/// transport any witness back to the input configuration.
pub fn is_numerically_rational(
    config: &OrderConfig,
    opts: &CheckOptions,
) -> Result<Verdict, Error> {
    let report = config.validate();
    if !report.ok() {
        return Err(Error::Hypothesis(format!(
            "configuration is not valid: {}",
            report.summary()
        )));
    }
    let (minimal, tower) = minimalize(config)?;
    let ell = LinearFunctional::minus_canonical(&minimal)?;

    let use_special = match opts.method {
        MethodChoice::Special => true,
        MethodChoice::Brute => false,
        MethodChoice::Auto => special_preconditions(&minimal.graph, &ell).is_ok(),
    };
    let mut verdict = if use_special {
        check_special(&minimal.graph, &ell)?
    } else {
        check_bruteforce_capped(&minimal.graph, &ell, opts.bound, opts.node_cap)?
    };

    if let Some(w) = verdict.witness.take() {
        // Total transform up the contraction tower; `g` values transfer
        // unchanged, so the witness stays a witness on the input.
        verdict.witness = Some(tower.pushforward_to_base(&w));
    }
    if let Some(v) = &verdict.witness_value {
        verdict.witness_chi = Some(config.half_rank() * v);
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalogue;
    use crate::lattice::frac;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn single_minus_two() -> ResolutionGraph {
        catalogue::chain_graph(&[2]).unwrap()
    }

    #[test]
    fn special_with_zero_functional_is_rational() {
        for seed in 0..10 {
            let g = catalogue::random_log_terminal(seed, 6, 4).unwrap();
            let verdict = check_special(&g, &LinearFunctional::zero()).unwrap();
            assert!(verdict.rational, "seed {seed}");
        }
    }

    #[test]
    fn special_flags_a_zero_value() {
        let g = single_minus_two();
        let ell = LinearFunctional::new([("v01", rat(-2))]);
        let verdict = check_special(&g, &ell).unwrap();
        assert!(!verdict.rational);
        assert_eq!(verdict.witness, Some(Divisor::single("v01")));
        assert_eq!(verdict.witness_value, Some(rat(0)));
    }

    #[test]
    fn special_preconditions_are_named() {
        let elliptic = catalogue::fixture("e6").unwrap().config.graph;
        let err = check_special(&elliptic, &LinearFunctional::zero()).unwrap_err();
        assert!(err.to_string().contains("log terminal"));

        let g = single_minus_two();
        let ell = LinearFunctional::new([("v01", rat(1))]);
        let err = check_special(&g, &ell).unwrap_err();
        assert!(err.to_string().contains("ell"));

        let g = catalogue::chain_graph(&[1]).unwrap();
        let err = check_special(&g, &LinearFunctional::zero()).unwrap_err();
        assert!(err.to_string().contains("minimal"));
    }

    #[test]
    fn special_on_the_case_graph() {
        let fx = catalogue::case2_32();
        let cfg = OrderConfig::unramified(fx.config.graph.clone());
        let ell = LinearFunctional::minus_canonical(&cfg).unwrap();
        let special = check_special(&cfg.graph, &ell).unwrap();
        assert!(special.rational);
        let brute = check_bruteforce(&cfg.graph, &ell, 6).unwrap();
        assert!(brute.rational);
    }

    #[test]
    fn brute_examples() {
        let g = single_minus_two();
        let verdict = check_bruteforce(&g, &LinearFunctional::zero(), 5).unwrap();
        assert!(verdict.rational);
        assert_eq!(verdict.bound_used, Some(5));

        let e6_graph = catalogue::fixture("e6").unwrap().config.graph;
        let ell = LinearFunctional::new([("E", frac(-9, 2))]);
        let verdict = check_bruteforce(&e6_graph, &ell, 3).unwrap();
        assert!(!verdict.rational);
        assert_eq!(verdict.witness, Some(Divisor::single("E")));
        assert_eq!(verdict.witness_value, Some(frac(-3, 2)));

        // g(E_1) = g(E_2) = 1, but g(E_1 + E_2) = 2 - 2 = 0: strictness at
        // zero makes the sum a witness, and it is the lex-least one.
        let a2 = catalogue::chain_graph(&[2, 2]).unwrap();
        let ell = LinearFunctional::new([("v01", rat(-1)), ("v02", rat(-1))]);
        let verdict = check_bruteforce(&a2, &ell, 4).unwrap();
        assert!(!verdict.rational);
        assert_eq!(
            verdict.witness,
            Some(Divisor::from_int_coeffs([("v01", 1), ("v02", 1)]))
        );
        assert_eq!(verdict.witness_value, Some(rat(0)));
    }

    #[test]
    fn brute_rejects_bad_bound_and_caps() {
        let g = single_minus_two();
        assert!(check_bruteforce(&g, &LinearFunctional::zero(), 0).is_err());

        let long = catalogue::chain_graph(&[2; 10]).unwrap();
        let err =
            check_bruteforce_capped(&long, &LinearFunctional::zero(), 6, 5).unwrap_err();
        assert!(matches!(err, Error::SearchCap { .. }));
    }

    /// Plain box enumeration in the same lexicographic order, for
    /// equivalence checks against the pruned search.
    fn naive_bruteforce(
        graph: &ResolutionGraph,
        ell: &LinearFunctional,
        bound: i64,
    ) -> Option<(Divisor, Rational)> {
        let z = numerical_cycle(graph, &graph.vertex_id_set()).unwrap();
        let mut ids = graph.vertex_ids();
        ids.sort();
        let form = graph.intersection_form();
        let bounds: Vec<i64> = ids
            .iter()
            .map(|id| i64::try_from(z.coeff(id).to_integer()).unwrap() * bound)
            .collect();
        let mut coeffs = vec![0i64; ids.len()];
        loop {
            // Advance odometer (most significant digit first = lex order).
            let mut pos = ids.len();
            loop {
                if pos == 0 {
                    return None;
                }
                pos -= 1;
                if coeffs[pos] < bounds[pos] {
                    coeffs[pos] += 1;
                    for c in coeffs.iter_mut().skip(pos + 1) {
                        *c = 0;
                    }
                    break;
                }
            }
            // The odometer enumerates in a different order than lex-least
            // first; use it only to find the set, then compare minima.
            let d = Divisor::from_int_coeffs(ids.iter().cloned().zip(coeffs.iter().copied()));
            if d.is_zero() {
                continue;
            }
            let v = g_value(&form, ell, &d).unwrap();
            if !v.is_positive() {
                return Some((d, v));
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn pruned_search_agrees_with_naive_enumeration(seed in 0u64..3000, lseed in 0u64..3000) {
            let graph = catalogue::random_log_terminal(seed, 4, 4).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(lseed);
            let ell = LinearFunctional::new(
                graph
                    .vertex_ids()
                    .into_iter()
                    .map(|id| (id, frac(-rng.random_range(0..=6i64), 2))),
            );
            let pruned = check_bruteforce(&graph, &ell, 2).unwrap();
            match naive_bruteforce(&graph, &ell, 2) {
                Some((_, _)) => {
                    prop_assert!(!pruned.rational);
                    // The pruned search must report a genuine counterexample.
                    let form = graph.intersection_form();
                    let w = pruned.witness.clone().unwrap();
                    prop_assert!(!g_value(&form, &ell, &w).unwrap().is_positive());
                }
                None => prop_assert!(pruned.rational),
            }
        }

        #[test]
        fn oracle_equivalence_of_special_and_brute(seed in 0u64..3000, lseed in 0u64..3000) {
            let graph = catalogue::random_log_terminal(seed, 6, 4).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(lseed);
            let ell = LinearFunctional::new(
                graph
                    .vertex_ids()
                    .into_iter()
                    .map(|id| (id, frac(-rng.random_range(0..=6i64), 2))),
            );
            let special = check_special(&graph, &ell).unwrap();
            let brute = check_bruteforce(&graph, &ell, 6).unwrap();
            prop_assert_eq!(
                special.rational,
                brute.rational,
                "special witness {:?} vs brute witness {:?}",
                special.witness,
                brute.witness
            );
        }
    }

    #[test]
    fn pipeline_on_fixture_configs() {
        let crepant = catalogue::fixture("crepant").unwrap().config;
        let verdict = is_numerically_rational(&crepant, &CheckOptions::default()).unwrap();
        assert!(verdict.rational);
        assert_eq!(verdict.method, Method::Special);

        let e6 = catalogue::fixture("e6").unwrap().config;
        let verdict = is_numerically_rational(&e6, &CheckOptions::default()).unwrap();
        assert!(!verdict.rational);
        assert_eq!(verdict.method, Method::Bruteforce);
        assert_eq!(verdict.witness, Some(Divisor::single("E")));
        assert_eq!(verdict.witness_chi, Some(rat(-3)));
    }

    #[test]
    fn pipeline_contracts_to_a_smooth_point() {
        let g = catalogue::chain_graph(&[1]).unwrap();
        let cfg = OrderConfig::unramified(g);
        let verdict = is_numerically_rational(&cfg, &CheckOptions::default()).unwrap();
        assert!(verdict.rational);
        assert_eq!(verdict.method, Method::Special);
    }

    #[test]
    fn pipeline_transports_witnesses_through_minimalization() {
        // Blow up the elliptic fixture, then check: the verdict must agree
        // and the witness must live on the blown-up configuration.
        let e6 = catalogue::fixture("e6").unwrap().config;
        let (blown, _) = crate::birational::blowup(
            &e6,
            &crate::birational::BlowupCenter::on_vertex("E"),
        )
        .unwrap();
        let verdict = is_numerically_rational(&blown, &CheckOptions::default()).unwrap();
        assert!(!verdict.rational);
        let w = verdict.witness.unwrap();
        // Total transform of E: strict part plus the new exceptional curve.
        assert_eq!(w, Divisor::from_int_coeffs([("E", 1), ("E0", 1)]));
        assert_eq!(verdict.witness_chi, Some(rat(-3)));
    }

    #[test]
    fn log_terminal_orders_are_rational_on_special_divisors() {
        for seed in 0..10 {
            let cfg = catalogue::random_order_config(seed, 6, 4).unwrap();
            let verdict = is_numerically_rational(&cfg, &CheckOptions::default()).unwrap();
            assert!(verdict.rational, "seed {seed}");
            assert_eq!(verdict.method, Method::Special, "seed {seed}");
            let brute = is_numerically_rational(
                &cfg,
                &CheckOptions {
                    method: MethodChoice::Brute,
                    bound: 6,
                    ..CheckOptions::default()
                },
            )
            .unwrap();
            assert!(brute.rational, "seed {seed}");
        }
    }

    #[test]
    fn all_minus_two_graphs_reduce_to_the_cycle_sign() {
        let ade: Vec<ResolutionGraph> = vec![
            catalogue::chain_graph(&[2]).unwrap(),
            catalogue::chain_graph(&[2, 2, 2]).unwrap(),
            catalogue::star_graph(2, &[vec![2], vec![2], vec![2]]).unwrap(),
            catalogue::star_graph(2, &[vec![2, 2], vec![2, 2], vec![2]]).unwrap(),
            catalogue::star_graph(2, &[vec![2, 2, 2, 2], vec![2, 2], vec![2]]).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for graph in &ade {
            for _ in 0..5 {
                let ell = LinearFunctional::new(
                    graph
                        .vertex_ids()
                        .into_iter()
                        .map(|id| (id, frac(-rng.random_range(0..=6i64), 2))),
                );
                let z = numerical_cycle(graph, &graph.vertex_id_set()).unwrap();
                let form = graph.intersection_form();
                let z_sign = g_value(&form, &ell, &z).unwrap().is_positive();
                let verdict = check_special(graph, &ell).unwrap();
                assert_eq!(verdict.rational, z_sign);
            }
        }
    }
}
