//! Example corpus, seeded random systems and implication checks.
//!
//! Every space here is finite, so the "exists δ" properties hold trivially
//! (δ below the smallest distance leaves only true orbits). Where that makes
//! an implication vacuous the checks below use its fixed-(ε, δ) form, which
//! the same arguments prove.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::chains::{is_chain_mixing, is_chain_mixing_at, is_chain_transitive, is_chain_transitive_at};
use crate::error::{Error, Result};
use crate::hyperspace::Hyperspace;
use crate::mixing::{is_mixing, is_transitive, is_weakly_mixing};
use crate::multimap::{builders, MultiMap};
use crate::rational::Rational;
use crate::shadowing::{
    has_shadowing, interleave_for_power, limit_average_distance, point_shadowing_failure,
    refute_average_shadowing, shadowing_holds, tent_counterexample_check, AverageRefutation,
};
use crate::space::{grid_interval, FiniteMetricSpace};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Example,
    Random { seed: u64 },
    Targeted { seed: u64 },
    File { path: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SystemSpec {
    pub name: String,
    pub provenance: Provenance,
    pub space: FiniteMetricSpace,
    pub mmap: MultiMap,
}

impl SystemSpec {
    pub fn new(
        name: impl Into<String>,
        provenance: Provenance,
        space: FiniteMetricSpace,
        mmap: MultiMap,
    ) -> Result<SystemSpec> {
        if space.len() != mmap.points() {
            return Err(Error::InvalidMap(format!(
                "maps act on {} points, space has {}",
                mmap.points(),
                space.len()
            )));
        }
        Ok(SystemSpec { name: name.into(), provenance, space, mmap })
    }

    pub fn hyperspace(&self) -> Result<Hyperspace<'_>> {
        Hyperspace::new(&self.space, &self.mmap)
    }

    /// `Some(c)` when the system is `{f1 ≡ c, f2}` with `f2(c) = c`.
    pub fn constant_fixed_pair(&self) -> Option<usize> {
        let t = self.mmap.tables();
        if t.len() != 2 {
            return None;
        }
        let c = t[0][0];
        (t[0].iter().all(|&v| v == c) && t[1][c] == c).then_some(c)
    }
}

fn example(name: &str, space: FiniteMetricSpace, maps: Vec<Vec<usize>>) -> SystemSpec {
    let mmap = MultiMap::for_space(&space, maps).expect("corpus maps are valid");
    SystemSpec::new(name, Provenance::Example, space, mmap).expect("corpus systems are valid")
}

/// The four worked systems: two constants on three points, the `{0, 1}`
/// pair, zero + tent on the grid of step 1/98, and the two 3-cycles.
pub fn corpus() -> Vec<SystemSpec> {
    let three = || FiniteMetricSpace::discrete_n(3).expect("valid");
    let grid98 = grid_interval(98).expect("valid");
    vec![
        example("const-ab", three(), vec![vec![0; 3], vec![1; 3]]),
        example("binary01", grid_interval(1).expect("valid"), vec![vec![0, 0], vec![1, 1]]),
        example("zero-tent", grid98, vec![builders::zero(99), builders::tent(98)]),
        example("perm3", three(), vec![vec![1, 2, 0], vec![2, 0, 1]]),
    ]
}

pub fn corpus_system(name: &str) -> Option<SystemSpec> {
    corpus().into_iter().find(|s| s.name == name)
}

fn random_metric(rng: &mut ChaCha8Rng, n: usize) -> Result<FiniteMetricSpace> {
    let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    match rng.gen_range(0..3) {
        0 => FiniteMetricSpace::discrete(labels),
        1 => {
            // distinct points on a line, coordinates in quarters
            let mut coords: Vec<i64> = (0..4 * n as i64 + 4).collect();
            coords.shuffle(rng);
            coords.truncate(n);
            let dist = coords
                .iter()
                .map(|a| coords.iter().map(|b| Rational::new((a - b).abs(), 4)).collect())
                .collect::<std::result::Result<Vec<Vec<Rational>>, _>>()?;
            FiniteMetricSpace::new(labels, dist)
        }
        _ => {
            // any symmetric choice from [1, 2] is a metric
            let mut dist = vec![vec![Rational::ZERO; n]; n];
            for i in 0..n {
                for j in i + 1..n {
                    let d = Rational::new(rng.gen_range(4..=8), 4)?;
                    dist[i][j] = d;
                    dist[j][i] = d;
                }
            }
            FiniteMetricSpace::new(labels, dist)
        }
    }
}

/// Deterministic in `seed`: a discrete, line or `[1, 2]`-weighted metric
/// and `m` uniformly random tables.
pub fn random_system(seed: u64, n_points: usize, m: usize) -> Result<SystemSpec> {
    if n_points == 0 || m == 0 {
        return Err(Error::InvalidArgument("need at least one point and one map".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = random_metric(&mut rng, n_points)?;
    let maps = (0..m)
        .map(|_| (0..n_points).map(|_| rng.gen_range(0..n_points)).collect())
        .collect();
    let mmap = MultiMap::new(n_points, maps)?;
    SystemSpec::new(format!("random-{seed}"), Provenance::Random { seed }, space, mmap)
}

/// `{f1 ≡ c, f2}` with a random `f2` fixing `c`.
pub fn constant_pair_system(seed: u64, n_points: usize) -> Result<SystemSpec> {
    if n_points == 0 {
        return Err(Error::InvalidArgument("need at least one point".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_c0de);
    let space = random_metric(&mut rng, n_points)?;
    let c = rng.gen_range(0..n_points);
    let mut f2: Vec<usize> = (0..n_points).map(|_| rng.gen_range(0..n_points)).collect();
    f2[c] = c;
    // half of the time make f2 a permutation on the other points
    if rng.gen_bool(0.5) {
        let mut rest: Vec<usize> = (0..n_points).filter(|&i| i != c).collect();
        rest.shuffle(&mut rng);
        let mut it = rest.iter();
        for (i, v) in f2.iter_mut().enumerate() {
            if i != c {
                *v = *it.next().expect("same length");
            }
        }
    }
    let mmap = MultiMap::new(n_points, vec![vec![c; n_points], f2])?;
    SystemSpec::new(format!("const-pair-{seed}"), Provenance::Targeted { seed }, space, mmap)
}

/// `count` random systems plus `count / 2` constant pairs, all with at most
/// `max_points` points and at most 3 maps.
pub fn generate_systems(seed: u64, count: usize, max_points: usize) -> Result<Vec<SystemSpec>> {
    if max_points == 0 {
        return Err(Error::InvalidArgument("max-points must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count + count / 2);
    for _ in 0..count {
        let s = rng.gen::<u64>();
        out.push(random_system(s, rng.gen_range(1..=max_points), rng.gen_range(1..=3))?);
    }
    for _ in 0..count / 2 {
        let s = rng.gen::<u64>();
        out.push(constant_pair_system(s, rng.gen_range(1..=max_points))?);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TheoremId {
    ConstantPairShadowing,
    ConstantPairTransitivity,
    PowerShadowing,
    PowerAverageShadowing,
    ChainMixingIsMixing,
    AverageShadowingChainTransitive,
    ShadowingTransitive,
    ComponentsVersusWhole,
}

impl TheoremId {
    pub const ALL: [TheoremId; 8] = [
        TheoremId::ConstantPairShadowing,
        TheoremId::ConstantPairTransitivity,
        TheoremId::PowerShadowing,
        TheoremId::PowerAverageShadowing,
        TheoremId::ChainMixingIsMixing,
        TheoremId::AverageShadowingChainTransitive,
        TheoremId::ShadowingTransitive,
        TheoremId::ComponentsVersusWhole,
    ];

    pub fn code(self) -> &'static str {
        match self {
            TheoremId::ConstantPairShadowing => "constant-pair-shadowing",
            TheoremId::ConstantPairTransitivity => "constant-pair-transitivity",
            TheoremId::PowerShadowing => "power-shadowing",
            TheoremId::PowerAverageShadowing => "power-average-shadowing",
            TheoremId::ChainMixingIsMixing => "chain-mixing-is-mixing",
            TheoremId::AverageShadowingChainTransitive => "average-shadowing-chain-transitive",
            TheoremId::ShadowingTransitive => "shadowing-transitive",
            TheoremId::ComponentsVersusWhole => "components-versus-whole",
        }
    }

    pub fn statement(self) -> &'static str {
        match self {
            TheoremId::ConstantPairShadowing => {
                "f1 = c, f2(c) = c: shadowing of F implies shadowing of f2"
            }
            TheoremId::ConstantPairTransitivity => {
                "f1 = c, f2(c) = c: each transitivity-type property of f2 carries over to F"
            }
            TheoremId::PowerShadowing => "F has shadowing iff F^k has shadowing",
            TheoremId::PowerAverageShadowing => "average shadowing of F implies that of F^k",
            TheoremId::ChainMixingIsMixing => "with shadowing, chain mixing iff mixing",
            TheoremId::AverageShadowingChainTransitive => "average shadowing implies chain transitive",
            TheoremId::ShadowingTransitive => "shadowing and average shadowing imply transitive",
            TheoremId::ComponentsVersusWhole => {
                "properties of the components and of F do not imply each other"
            }
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for TheoremId {
    type Err = Error;
    fn from_str(s: &str) -> Result<TheoremId> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.code().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown theorem id {s:?}")))
    }
}

impl Serialize for TheoremId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.code())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub system: SystemSpec,
    pub details: String,
}

/// A refuter-dependent inconsistency: worth a look, not a failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Flag {
    pub system: String,
    pub details: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    pub theorem: TheoremId,
    pub statement: String,
    pub systems_tested: usize,
    /// How many systems met each hypothesis that was evaluated.
    pub hypotheses: BTreeMap<String, usize>,
    pub counterexamples: Vec<Counterexample>,
    pub flags: Vec<Flag>,
    pub caveats: Vec<String>,
}

impl TheoremReport {
    fn new(theorem: TheoremId) -> TheoremReport {
        TheoremReport {
            theorem,
            statement: theorem.statement().to_string(),
            systems_tested: 0,
            hypotheses: BTreeMap::new(),
            counterexamples: Vec::new(),
            flags: Vec::new(),
            caveats: Vec::new(),
        }
    }

    pub fn is_clean(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

#[derive(Default)]
struct Outcome {
    hypotheses: Vec<&'static str>,
    counterexamples: Vec<String>,
    flags: Vec<String>,
}

/// Distances at which verdicts can change, with 0 in front for δ.
fn delta_representatives(space: &FiniteMetricSpace) -> Vec<Rational> {
    let mut reps = vec![Rational::ZERO];
    reps.extend(space.critical_values());
    reps
}

/// ε and schedule for the average-shadowing refuter, scaled by the diameter.
fn average_parameters(space: &FiniteMetricSpace, eps_div: i64) -> Result<(Rational, Vec<Rational>)> {
    let d = space.diameter();
    let schedule = [2, 4, 8]
        .into_iter()
        .map(|k| d.checked_div_int(k))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok((d.checked_div_int(eps_div)?, schedule))
}

fn refute(space: &FiniteMetricSpace, f: &MultiMap, eps: Rational, schedule: &[Rational]) -> Result<Option<AverageRefutation>> {
    if !eps.is_positive() {
        return Ok(None);
    }
    refute_average_shadowing(space, f, eps, schedule)
}

fn check_constant_pair_shadowing(sys: &SystemSpec) -> Result<Outcome> {
    let mut out = Outcome::default();
    if sys.constant_fixed_pair().is_none() {
        return Ok(out);
    }
    out.hypotheses.push("f1 = c, f2(c) = c");
    let hs = sys.hyperspace()?;
    let f2 = sys.mmap.tables()[1].clone();
    let two = Rational::integer(2);
    for delta in delta_representatives(&sys.space) {
        for eps in sys.space.critical_values() {
            let half = eps / two;
            if shadowing_holds(&hs, half, delta)?.holds {
                if let Some(prefix) = point_shadowing_failure(&sys.space, &f2, eps, delta)? {
                    out.counterexamples.push(format!(
                        "F shadows at (eps {half}, delta {delta}) but f2 fails at (eps {eps}, delta {delta}) along {prefix:?}"
                    ));
                }
            }
        }
    }
    let (eps, schedule) = average_parameters(&sys.space, 4)?;
    let f2_alone = sys.mmap.component(1);
    if refute(&sys.space, &f2_alone, eps, &schedule)?.is_some() {
        out.hypotheses.push("f2 average shadowing refuted");
        if refute(&sys.space, &sys.mmap, eps / two, &schedule)?.is_none() {
            out.flags.push(format!(
                "f2 refuted at eps {eps} but no refutation for F at eps {}",
                eps / two
            ));
        }
    }
    Ok(out)
}

fn check_constant_pair_transitivity(sys: &SystemSpec) -> Result<Outcome> {
    let mut out = Outcome::default();
    if sys.constant_fixed_pair().is_none() {
        return Ok(out);
    }
    out.hypotheses.push("f1 = c, f2(c) = c");
    let f2 = sys.mmap.component(1);
    let pairs: [(&'static str, fn(&MultiMap) -> bool); 3] = [
        ("transitive", |f| is_transitive(f).holds),
        ("weakly mixing", |f| is_weakly_mixing(f).holds),
        ("mixing", |f| is_mixing(f).holds),
    ];
    for (name, check) in pairs {
        if check(&f2) {
            out.hypotheses.push(name);
            if !check(&sys.mmap) {
                out.counterexamples.push(format!("f2 is {name} but F is not"));
            }
        }
    }
    let hs_f = sys.hyperspace()?;
    let hs_2 = Hyperspace::new(&sys.space, &f2)?;
    if is_chain_transitive(&hs_2).holds {
        out.hypotheses.push("chain transitive");
    }
    if is_chain_mixing(&hs_2).holds {
        out.hypotheses.push("chain mixing");
    }
    for delta in delta_representatives(&sys.space) {
        if is_chain_transitive_at(&hs_2, delta).holds && !is_chain_transitive_at(&hs_f, delta).holds {
            out.counterexamples
                .push(format!("f2 is chain transitive at delta {delta} but F is not"));
        }
        if is_chain_mixing_at(&hs_2, delta).holds && !is_chain_mixing_at(&hs_f, delta).holds {
            out.counterexamples.push(format!("f2 is chain mixing at delta {delta} but F is not"));
        }
    }
    Ok(out)
}

fn check_power_shadowing(sys: &SystemSpec) -> Result<Outcome> {
    let mut out = Outcome::default();
    let hs = sys.hyperspace()?;
    let whole = has_shadowing(&hs).holds;
    for k in [2usize, 3] {
        let fk = sys.mmap.compose_power(k)?;
        let hs_k = Hyperspace::new(&sys.space, &fk)?;
        if has_shadowing(&hs_k).holds != whole {
            out.counterexamples.push(format!("shadowing of F and of F^{k} disagree"));
        }
        for delta in delta_representatives(&sys.space) {
            for eps in sys.space.critical_values() {
                if shadowing_holds(&hs, eps, delta)?.holds {
                    let vk = shadowing_holds(&hs_k, eps, delta)?;
                    if !vk.holds {
                        out.counterexamples.push(format!(
                            "F shadows at (eps {eps}, delta {delta}) but F^{k} fails: {:?}",
                            vk.failure
                        ));
                    }
                }
            }
        }
    }
    if whole {
        out.hypotheses.push("has shadowing");
    }
    Ok(out)
}

fn check_power_average(sys: &SystemSpec) -> Result<Outcome> {
    let mut out = Outcome::default();
    let (eps, schedule) = average_parameters(&sys.space, 4)?;
    for k in [2usize, 3] {
        let fk = sys.mmap.compose_power(k)?;
        let Some(found) = refute(&sys.space, &fk, eps, &schedule)? else { continue };
        out.hypotheses.push(if k == 2 { "F^2 refuted" } else { "F^3 refuted" });
        // Lifting a pseudo-orbit of F^k to F keeps every orbit's long-run
        // average at least 1/k of its average along the subsequence.
        for entry in &found.per_delta {
            let lifted = interleave_for_power(&sys.space, &sys.mmap, k, &entry.pseudo)?;
            let bound = entry.min_limit_average.checked_div_int(k as i64)?;
            for y in 0..sys.space.len() {
                let avg = limit_average_distance(&sys.space, &sys.mmap, y, &lifted)?;
                if avg < bound {
                    out.counterexamples.push(format!(
                        "lifted F^{k} pseudo-orbit (delta {}) has y = {y} at average {avg} < {bound}",
                        entry.delta
                    ));
                }
            }
        }
        let eps_k = eps.checked_div_int(k as i64)?;
        if refute(&sys.space, &sys.mmap, eps_k, &schedule)?.is_none() {
            out.flags.push(format!(
                "F^{k} refuted at eps {eps}, no refutation found for F at eps {eps_k}"
            ));
        }
    }
    Ok(out)
}

fn check_chain_mixing_is_mixing(sys: &SystemSpec) -> Result<Outcome> {
    let mut out = Outcome::default();
    let hs = sys.hyperspace()?;
    if !has_shadowing(&hs).holds {
        return Ok(out);
    }
    out.hypotheses.push("has shadowing");
    let chain = is_chain_mixing(&hs).holds;
    let exact = is_mixing(&sys.mmap).holds;
    if chain {
        out.hypotheses.push("chain mixing");
    }
    if chain != exact {
        out.counterexamples.push(format!("chain mixing is {chain} but mixing is {exact}"));
    }
    Ok(out)
}

fn check_refuter_predicts(sys: &SystemSpec, premise_fails: bool, premise: &'static str) -> Result<Outcome> {
    let mut out = Outcome::default();
    if !premise_fails {
        return Ok(out);
    }
    out.hypotheses.push(premise);
    let (eps, schedule) = average_parameters(&sys.space, 16)?;
    if refute(&sys.space, &sys.mmap, eps, &schedule)?.is_none() {
        out.flags.push(format!(
            "{premise}, yet no average-shadowing refutation at eps {eps} for delta in {schedule:?}"
        ));
    }
    Ok(out)
}

fn check_one(id: TheoremId, sys: &SystemSpec) -> Result<Outcome> {
    match id {
        TheoremId::ConstantPairShadowing => check_constant_pair_shadowing(sys),
        TheoremId::ConstantPairTransitivity => check_constant_pair_transitivity(sys),
        TheoremId::PowerShadowing => check_power_shadowing(sys),
        TheoremId::PowerAverageShadowing => check_power_average(sys),
        TheoremId::ChainMixingIsMixing => check_chain_mixing_is_mixing(sys),
        TheoremId::AverageShadowingChainTransitive => {
            let hs = sys.hyperspace()?;
            check_refuter_predicts(sys, !is_chain_transitive(&hs).holds, "not chain transitive")
        }
        TheoremId::ShadowingTransitive => {
            check_refuter_predicts(sys, !is_transitive(&sys.mmap).holds, "not transitive")
        }
        TheoremId::ComponentsVersusWhole => Ok(Outcome::default()),
    }
}

fn caveats(id: TheoremId) -> Vec<String> {
    let semi = "average shadowing is only ever refuted, over block orbits and a finite delta \
                schedule; refuter outcomes yield flags, never counterexamples"
        .to_string();
    match id {
        TheoremId::ConstantPairShadowing => vec![
            "checked at every critical (eps, delta): F at eps/2 against f2 on point pseudo-orbits at eps".into(),
            semi,
        ],
        TheoremId::ConstantPairTransitivity => vec![
            "the hypothesis includes f2(c) = c; without it the statement fails, e.g. f1 = 0 and f2 \
             swapping two points gives a non-transitive F"
                .into(),
            "chain properties are compared at every fixed delta as well as for all delta".into(),
        ],
        TheoremId::PowerShadowing => {
            vec!["forward direction checked at every critical (eps, delta) for k = 2, 3".into()]
        }
        TheoremId::PowerAverageShadowing => vec![
            semi,
            "exact part: lifting a refuting pseudo-orbit of F^k to F keeps averages above 1/k of the original".into(),
        ],
        TheoremId::AverageShadowingChainTransitive | TheoremId::ShadowingTransitive => vec![semi],
        TheoremId::ChainMixingIsMixing => Vec::new(),
        TheoremId::ComponentsVersusWhole => Vec::new(),
    }
}

fn run_parallel(id: TheoremId, systems: &[SystemSpec]) -> Result<Vec<Outcome>> {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(systems.len().max(1));
    let chunk = systems.len().div_ceil(threads).max(1);
    std::thread::scope(|scope| {
        let handles: Vec<_> = systems
            .chunks(chunk)
            .map(|part| scope.spawn(move || part.iter().map(|s| check_one(id, s)).collect::<Vec<_>>()))
            .collect();
        let mut all = Vec::with_capacity(systems.len());
        for h in handles {
            all.extend(h.join().expect("checker thread panicked"));
        }
        all.into_iter().collect()
    })
}

/// Evaluates one implication on every system. Counterexamples come only from
/// exact checks and are re-run before being reported.
pub fn check_theorem(id: TheoremId, systems: &[SystemSpec]) -> Result<TheoremReport> {
    if id == TheoremId::ComponentsVersusWhole {
        return check_relation_examples();
    }
    let outcomes = run_parallel(id, systems)?;
    let mut report = TheoremReport::new(id);
    report.systems_tested = systems.len();
    report.caveats = caveats(id);
    for (sys, outcome) in systems.iter().zip(outcomes) {
        for h in outcome.hypotheses {
            *report.hypotheses.entry(h.to_string()).or_default() += 1;
        }
        if !outcome.counterexamples.is_empty() {
            let again = check_one(id, sys)?;
            if again.counterexamples != outcome.counterexamples {
                return Err(Error::InvalidArgument(format!(
                    "counterexample on {} did not reproduce",
                    sys.name
                )));
            }
        }
        for details in outcome.counterexamples {
            report.counterexamples.push(Counterexample { system: sys.clone(), details });
        }
        for details in outcome.flags {
            report.flags.push(Flag { system: sys.name.clone(), details });
        }
    }
    Ok(report)
}

/// Properties of the 3-cycles against the perm3 pair, and of the zero and
/// tent maps against the zero + tent pair.
pub fn check_relation_examples() -> Result<TheoremReport> {
    let mut report = TheoremReport::new(TheoremId::ComponentsVersusWhole);
    let perm3 = corpus_system("perm3").expect("perm3 is in the corpus");
    let hs = perm3.hyperspace()?;
    report.systems_tested = 2;

    let mut whole_fails = Vec::new();
    if is_transitive(&perm3.mmap).holds {
        whole_fails.push("perm3 is transitive");
    }
    if is_weakly_mixing(&perm3.mmap).holds {
        whole_fails.push("perm3 is weakly mixing");
    }
    if is_chain_transitive(&hs).holds {
        whole_fails.push("perm3 is chain transitive");
    }
    for details in whole_fails {
        report.counterexamples.push(Counterexample { system: perm3.clone(), details: details.into() });
    }
    for j in 0..2 {
        let fj = perm3.mmap.component(j);
        let component = SystemSpec::new(
            format!("perm3-f{}", j + 1),
            Provenance::Example,
            perm3.space.clone(),
            fj.clone(),
        )?;
        let hs_j = component.hyperspace()?;
        let checks = [
            ("transitive", is_transitive(&fj).holds, is_transitive(&fj).note),
            ("weakly mixing", is_weakly_mixing(&fj).holds, is_weakly_mixing(&fj).note),
            ("chain transitive", is_chain_transitive(&hs_j).holds, None),
        ];
        for (name, holds, note) in checks {
            *report.hypotheses.entry(format!("f{} {name}", j + 1)).or_default() += holds as usize;
            if !holds {
                report.counterexamples.push(Counterexample {
                    system: component.clone(),
                    details: format!(
                        "f{} alone is not {name}{}",
                        j + 1,
                        note.map(|n| format!(": {n}")).unwrap_or_default()
                    ),
                });
            }
        }
    }

    let tent = tent_counterexample_check(98, Rational::new(1, 49)?, Rational::new(1, 98)?)?;
    let zero_tent = corpus_system("zero-tent").expect("zero-tent is in the corpus");
    if !(tent.pseudo_orbit_valid && tent.not_shadowable) {
        report.counterexamples.push(Counterexample {
            system: zero_tent,
            details: format!(
                "grid 98: pseudo-orbit valid {}, not shadowable {}",
                tent.pseudo_orbit_valid, tent.not_shadowable
            ),
        });
    }
    let small = grid_interval(8)?;
    for (name, table) in [("zero", builders::zero(9)), ("tent", builders::tent(8))] {
        let f = MultiMap::for_space(&small, vec![table])?;
        let hs = Hyperspace::new(&small, &f)?;
        if !has_shadowing(&hs).holds {
            let system = SystemSpec::new(format!("{name}-grid8"), Provenance::Example, small.clone(), f)?;
            report.counterexamples.push(Counterexample { system, details: format!("{name} lacks shadowing") });
        }
    }
    report.caveats.push(
        "on a finite grid every map has shadowing; the failure of zero + tent is shown at the fixed \
         (eps, delta) = (1/49, 1/98) with an explicit pseudo-orbit"
            .into(),
    );
    Ok(report)
}

/// Every implication over the generated systems plus the small corpus
/// systems, followed by the component-versus-whole examples.
pub fn run_suite(seed: u64, count: usize, max_points: usize) -> Result<Vec<TheoremReport>> {
    let cap = crate::hyperspace::node_cap_from_env();
    let mut systems: Vec<SystemSpec> =
        corpus().into_iter().filter(|s| s.space.len() <= cap).collect();
    systems.extend(generate_systems(seed, count, max_points)?);
    TheoremId::ALL.into_iter().map(|id| check_theorem(id, &systems)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::space::validate_metric;

    #[test]
    fn corpus_contents() {
        let c = corpus();
        let names: Vec<&str> = c.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, ["const-ab", "binary01", "zero-tent", "perm3"]);
        let perm3 = corpus_system("perm3").unwrap();
        assert_eq!(perm3.mmap.tables(), [vec![1, 2, 0], vec![2, 0, 1]]);
        let b = corpus_system("binary01").unwrap();
        assert_eq!(b.mmap.ran().iter().map(|s| s.to_string()).collect::<Vec<_>>(), ["{0,1}"]);
        assert_eq!(corpus_system("zero-tent").unwrap().space.len(), 99);
        assert_eq!(corpus_system("const-ab").unwrap().constant_fixed_pair(), None);
    }

    #[test]
    fn random_systems_are_deterministic_and_valid() {
        assert_eq!(random_system(7, 4, 2).unwrap(), random_system(7, 4, 2).unwrap());
        let s = random_system(42, 4, 2).unwrap();
        assert!(validate_metric(s.space.matrix()).is_ok());
        assert_eq!(s.mmap.len(), 2);
        for seed in 0..50 {
            let p = constant_pair_system(seed, 4).unwrap();
            assert!(p.constant_fixed_pair().is_some());
        }
        assert_eq!(generate_systems(3, 10, 5).unwrap(), generate_systems(3, 10, 5).unwrap());
    }

    #[test]
    fn one_point_systems_satisfy_everything() {
        let s = random_system(1, 1, 2).unwrap();
        let hs = s.hyperspace().unwrap();
        assert!(is_transitive(&s.mmap).holds);
        assert!(is_mixing(&s.mmap).holds);
        assert!(is_chain_mixing(&hs).holds);
        assert!(has_shadowing(&hs).holds);
    }

    #[test]
    fn theorem_ids_round_trip() {
        for id in TheoremId::ALL {
            assert_eq!(id.code().parse::<TheoremId>().unwrap(), id);
        }
        assert!("nope".parse::<TheoremId>().is_err());
    }

    #[test]
    fn refuter_consistency_on_corpus() {
        let perm3 = corpus_system("perm3").unwrap();
        let r = check_theorem(TheoremId::AverageShadowingChainTransitive, &[perm3]).unwrap();
        assert_eq!(r.hypotheses.get("not chain transitive"), Some(&1));
        assert!(r.flags.is_empty(), "{:?}", r.flags);
        assert!(r.is_clean());

        let c = corpus_system("const-ab").unwrap();
        let r = check_theorem(TheoremId::ShadowingTransitive, &[c.clone()]).unwrap();
        assert!(r.hypotheses.is_empty());
        let (eps, schedule) = average_parameters(&c.space, 16).unwrap();
        assert!(refute(&c.space, &c.mmap, eps, &schedule).unwrap().is_none());
        assert_eq!(eps, q(1, 16));
    }

    #[test]
    fn power_checks_on_corpus() {
        let systems: Vec<SystemSpec> = corpus().into_iter().filter(|s| s.space.len() <= 3).collect();
        for id in [TheoremId::PowerShadowing, TheoremId::ChainMixingIsMixing, TheoremId::PowerAverageShadowing] {
            let r = check_theorem(id, &systems).unwrap();
            assert!(r.is_clean(), "{id}: {:?}", r.counterexamples);
        }
    }

    #[test]
    fn relation_examples_report_the_three_cycle() {
        let r = check_relation_examples().unwrap();
        // a lone 3-cycle never meets two targets at one time, so it is not weakly mixing
        let details: Vec<&str> = r.counterexamples.iter().map(|c| c.details.as_str()).collect();
        assert_eq!(details.len(), 2);
        assert!(details.iter().all(|d| d.contains("not weakly mixing")));
        assert_eq!(r.hypotheses["f1 transitive"], 1);
        assert_eq!(r.hypotheses["f2 chain transitive"], 1);
    }
}
