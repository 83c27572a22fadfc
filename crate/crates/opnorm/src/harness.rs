//! The verification suite: pinned values of the μ, Haagerup, cb and γ₂
//! engines, the sandwich corpus, and the report writers.
//!
//! Every check derives its seed from the suite seed and its own name, so a
//! check's numbers do not depend on which other checks ran or in what order.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;
use std::thread;
use std::time::Instant;

use opnorm_core::cb::{cb_norm_hilbertian_domain, level_norm, smith_level};
use opnorm_core::factor::{gamma2_linf, gamma_rc, split_norm};
use opnorm_core::haagerup::{haagerup3_upper, haagerup_upper};
use opnorm_core::mu::{mu_lower, mu_of_space, mu_upper};
use opnorm_core::pairs::{commutant_sample, map_into_full, pair_eval, random_quadruple, theorem2_blocks, theorem2_sample};
use opnorm_core::rng::{gaussian_matrix, stream};
use opnorm_core::space::{Hilbertian, SpaceRef};
use opnorm_core::{
    ComplexMatrix, ConcreteOperatorSpace, NormEstimate, OptOptions, SpaceMap, StandardKind, Tensor3, TensorElement, C64,
};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SUITE_VERSION: &str = "1";

const CR_IDENTITY: &str = r"we have $C\otimes_\mu R=K$ isometrically";
const RC_HAAGERUP: &str = r"is isometric to $K^*$";
const COR10: &str = r"iff either $E = R_n$ or $E=C_n$";
const REMARK13: &str = r"hence by Corollary 9, we have";
const THM2: &str = r"using matrix notation, as follows";
const GAMMA2: &str = r"$\gamma_2(v)=\sqrt{n}$";
const SANDWICH: &str = r"with commuting ranges";
const THREE_FOLD: &str = r"$C \otimes_h E_3 \otimes_h R=K\otimes_{\min} E_3$";
const CB: &str = r"$\|u\|_{cb}$ the corresponding norm";
const INEQ9: &str = r"it is easy to check that";

/// Fresh pair samples per corpus tensor, on indices disjoint from the ones
/// `mu_lower` draws.
const PAIR_SAMPLES: u64 = 8;
const PAIR_INDEX_OFFSET: u64 = 1_000_000;
/// Search budget of the level-norm estimates of block maps.
const BLOCK_LEVEL_RESTARTS: usize = 4;
const BLOCK_LEVEL_ITERS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Markdown,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "markdown" | "md" => Ok(Format::Markdown),
            _ => Err(Error::Invalid(format!("unknown report format `{s}` (json or markdown)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Overrides every routine's restart count; zero starves the searches.
    pub restarts: Option<usize>,
    pub iters: Option<usize>,
    pub commutant_samples: usize,
    pub block_samples: usize,
    pub corpus_size: usize,
    pub quadruples: usize,
    pub dims: Vec<usize>,
    pub out: Option<PathBuf>,
    pub format: Format,
    /// Run checks on separate threads; the report order is unchanged.
    pub parallel: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            restarts: None,
            iters: None,
            commutant_samples: opnorm_core::mu::DEFAULT_COMMUTANT_SAMPLES,
            block_samples: opnorm_core::mu::DEFAULT_BLOCK_SAMPLES,
            corpus_size: 50,
            quadruples: 20,
            dims: vec![2, 3],
            out: None,
            format: Format::Json,
            parallel: false,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() {
            return Err(Error::Invalid("no dimensions to check".into()));
        }
        // rowcap(n) lives in M_{2n}; keep ambients at desk scale
        if let Some(n) = self.dims.iter().find(|&&n| !(1..=4).contains(&n)) {
            return Err(Error::Invalid(format!("dimension {n} outside 1..=4")));
        }
        let counts = [
            ("commutant samples", self.commutant_samples),
            ("block samples", self.block_samples),
            ("corpus size", self.corpus_size),
            ("quadruples", self.quadruples),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, c)| *c == 0) {
            return Err(Error::Invalid(format!("{name} must be positive")));
        }
        Ok(())
    }

    fn options(&self, seed: u64) -> OptOptions {
        OptOptions {
            restarts: self.restarts,
            iters: self.iters,
            seed,
            commutant_samples: Some(self.commutant_samples),
            block_samples: Some(self.block_samples),
            ..OptOptions::default()
        }
    }
}

/// A single number or a closed interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Expected {
    Value(f64),
    Interval([f64; 2]),
}

impl Expected {
    pub fn bounds(self) -> (f64, f64) {
        match self {
            Expected::Value(v) => (v, v),
            Expected::Interval([lo, hi]) => (lo, hi),
        }
    }

    fn contains(self, x: f64, tolerance: f64) -> bool {
        let (lo, hi) = self.bounds();
        x.is_finite() && lo - tolerance <= x && x <= hi + tolerance
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    ReportedOnly,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::ReportedOnly => "reported-only",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check_id: String,
    pub claim: String,
    pub computed: Vec<f64>,
    pub expected: Expected,
    pub tolerance: f64,
    pub status: Status,
    pub runtime_ms: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite_version: String,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn gating_failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn passed(&self) -> bool {
        self.gating_failures().next().is_none()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    pub fn to_markdown(&self) -> String {
        let mut s = format!("# Verification report\n\nsuite version {}, seed {}\n\n", self.suite_version, self.seed);
        s.push_str("| check | status | computed | expected | tolerance | ms | claim |\n");
        s.push_str("|---|---|---|---|---|---|---|\n");
        for c in &self.checks {
            let computed = c.computed.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(", ");
            let expected = match c.expected {
                Expected::Value(v) => format!("{v:.6}"),
                Expected::Interval([lo, hi]) => format!("[{lo:.6}, {hi:.6}]"),
            };
            let mut claim = c.claim.clone();
            if let Some(note) = &c.note {
                let _ = write!(claim, " ({note})");
            }
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {:e} | {} | {} |",
                c.check_id,
                c.status.as_str(),
                computed,
                expected,
                c.tolerance,
                c.runtime_ms,
                claim.replace('|', "\\|")
            );
        }
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Markdown => self.to_markdown(),
        }
    }

    pub fn write(&self, path: &Path, format: Format) -> Result<()> {
        std::fs::write(path, self.render(format)).map_err(|source| Error::Io { path: path.to_path_buf(), source })
    }
}

/// Seed of the check `name` under the suite seed.
pub fn check_seed(seed: u64, name: &str) -> u64 {
    stream(seed, name, 0).gen()
}

/// Runs every check in order and writes the report when an output path is
/// configured.
pub fn run_suite(config: &SuiteConfig) -> Result<Report> {
    config.validate()?;
    let groups = plan(config);
    let outcomes: Vec<Vec<CheckResult>> = if config.parallel {
        thread::scope(|s| {
            let handles: Vec<_> = groups.iter().map(|g| s.spawn(|| g.execute(config))).collect();
            handles.into_iter().map(|h| h.join().expect("check panicked")).collect()
        })
    } else {
        groups.iter().map(|g| g.execute(config)).collect()
    };
    let report = Report { suite_version: SUITE_VERSION.into(), seed: config.seed, checks: outcomes.into_iter().flatten().collect() };
    if let Some(path) = &config.out {
        report.write(path, config.format)?;
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Checks.

struct RowSpec {
    id: String,
    claim: String,
    expected: Expected,
    tolerance: f64,
    reported_only: bool,
}

fn gate(id: impl Into<String>, claim: String, expected: Expected, tolerance: f64) -> RowSpec {
    RowSpec { id: id.into(), claim, expected, tolerance, reported_only: false }
}

fn report_only(id: impl Into<String>, claim: String, expected: Expected, tolerance: f64) -> RowSpec {
    RowSpec { id: id.into(), claim, expected, tolerance, reported_only: true }
}

/// Optimizer bookkeeping across the estimates behind one check.
#[derive(Default)]
struct Searches {
    total: usize,
    unconverged: usize,
    starved: bool,
}

impl Searches {
    fn see(&mut self, est: &NormEstimate) {
        self.total += 1;
        if !est.trace.converged {
            self.unconverged += 1;
            self.starved |= est.trace.restarts == 0 || est.trace.iterations == 0;
        }
    }

    fn merge(&mut self, other: Searches) {
        self.total += other.total;
        self.unconverged += other.unconverged;
        self.starved |= other.starved;
    }
}

struct Measured {
    computed: Vec<Vec<f64>>,
    notes: Vec<Option<String>>,
    searches: Searches,
}

impl Measured {
    fn new(computed: Vec<Vec<f64>>, searches: Searches) -> Self {
        let notes = vec![None; computed.len()];
        Measured { computed, notes, searches }
    }
}

type Runner = Box<dyn Fn(&OptOptions, &SuiteConfig) -> Result<Measured> + Send + Sync>;

/// Rows sharing one computation.
struct Group {
    name: String,
    rows: Vec<RowSpec>,
    run: Runner,
}

impl Group {
    fn new(name: impl Into<String>, rows: Vec<RowSpec>, run: impl Fn(&OptOptions, &SuiteConfig) -> Result<Measured> + Send + Sync + 'static) -> Self {
        Group { name: name.into(), rows, run: Box::new(run) }
    }

    fn execute(&self, config: &SuiteConfig) -> Vec<CheckResult> {
        let seed = check_seed(config.seed, &self.name);
        let start = Instant::now();
        let outcome = (self.run)(&config.options(seed), config);
        let runtime_ms = start.elapsed().as_millis() as u64;
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let (computed, status, note) = match &outcome {
                    Err(e) => (Vec::new(), Status::Fail, Some(format!("error: {e}"))),
                    Ok(m) => {
                        let computed = m.computed[i].clone();
                        let mut notes: Vec<String> = m.notes[i].iter().cloned().collect();
                        let status = if m.searches.starved {
                            notes.push("converged=false: optimizer budget exhausted".into());
                            Status::Fail
                        } else if !computed.is_empty() && computed.iter().all(|&x| row.expected.contains(x, row.tolerance)) {
                            Status::Pass
                        } else {
                            Status::Fail
                        };
                        if !m.searches.starved && m.searches.unconverged > 0 {
                            notes.push(format!("converged=false on {} of {} searches", m.searches.unconverged, m.searches.total));
                        }
                        (computed, status, (!notes.is_empty()).then(|| notes.join("; ")))
                    }
                };
                let status = if row.reported_only { Status::ReportedOnly } else { status };
                CheckResult {
                    check_id: row.id.clone(),
                    claim: row.claim.clone(),
                    computed,
                    expected: row.expected,
                    tolerance: row.tolerance,
                    status,
                    runtime_ms,
                    seed,
                    note,
                }
            })
            .collect()
    }
}

fn sp(kind: StandardKind) -> SpaceRef {
    Arc::new(ConcreteOperatorSpace::standard(kind))
}

fn plan(config: &SuiteConfig) -> Vec<Group> {
    let dims = config.dims.clone();
    let mut groups = Vec::new();

    for &n in &dims {
        groups.push(Group::new(
            format!("cr-identity-n{n}"),
            vec![
                gate(format!("cr-identity-upper-n{n}"), format!("mu_upper of Σ e_i1⊗e_1i in column({n})⊗row({n}) is at most 1 + 1e-3: \"{CR_IDENTITY}\""), Expected::Interval([1.0, 1.0 + 1e-3]), 1e-9),
                gate(format!("cr-identity-lower-n{n}"), format!("mu_lower of Σ e_i1⊗e_1i in column({n})⊗row({n}) is 1: \"{CR_IDENTITY}\""), Expected::Value(1.0), 1e-9),
            ],
            move |opts, _| {
                let t = TensorElement::diagonal(sp(StandardKind::Column(n)), sp(StandardKind::Row(n)))?;
                let (up, lo) = (mu_upper(&t, opts)?, mu_lower(&t, opts)?);
                let mut s = Searches::default();
                s.see(&up);
                Ok(Measured::new(vec![vec![up.value], vec![lo.value]], s))
            },
        ));
    }

    for &n in &dims {
        groups.push(Group::new(
            format!("rc-haagerup-n{n}"),
            vec![gate(format!("rc-haagerup-n{n}"), format!("Haagerup norm of Σ e_1i⊗e_i1 in row({n})⊗column({n}) is {n}: \"{RC_HAAGERUP}\""), Expected::Interval([n as f64, n as f64 + 1e-2]), 1e-9)],
            move |opts, _| {
                let t = TensorElement::diagonal(sp(StandardKind::Row(n)), sp(StandardKind::Column(n)))?;
                let h = haagerup_upper(&t, opts)?;
                let mut s = Searches::default();
                s.see(&h);
                Ok(Measured::new(vec![vec![h.value]], s))
            },
        ));
    }

    for &n in &dims {
        for (name, kind) in [("row", StandardKind::Row(n)), ("column", StandardKind::Column(n))] {
            groups.push(Group::new(
                format!("cor10-{name}-n{n}"),
                vec![gate(format!("cor10-{name}-n{n}"), format!("μ({name}({n})) window [lower, upper] lies in [1, 1 + 1e-2]: \"{COR10}\""), Expected::Interval([1.0, 1.0 + 1e-2]), 1e-9)],
                move |opts, _| {
                    let w = mu_of_space(&sp(kind), opts)?;
                    let mut s = Searches::default();
                    s.see(&w.upper);
                    Ok(Measured::new(vec![vec![w.lower.value, w.upper.value]], s))
                },
            ));
        }
    }

    for &n in &dims {
        let root = (n as f64).sqrt();
        let reference = (1.0 + root) / 2.0;
        groups.push(Group::new(
            format!("remark13-n{n}"),
            vec![
                gate(format!("remark13-window-n{n}"), format!("μ(row∩column({n})) window [lower, upper] has upper end at most √{n} + 1e-2: \"{REMARK13}\""), Expected::Interval([1.0, root + 1e-2]), 1e-9),
                report_only(format!("remark13-reference-n{n}"), format!("reference lower bound (1+√{n})/2 against the window [lower, upper]: \"{REMARK13}\""), Expected::Value(reference), 0.0),
            ],
            move |opts, _| {
                let w = mu_of_space(&sp(StandardKind::RowCap(n)), opts)?;
                let mut s = Searches::default();
                s.see(&w.upper);
                let mut m = Measured::new(vec![vec![w.lower.value, w.upper.value], vec![w.lower.value, w.upper.value]], s);
                m.notes[1] = Some(format!("lower bound via {}", w.lower.trace.method));
                Ok(m)
            },
        ));
    }

    groups.push(Group::new(
        "thm2-construction",
        vec![
            gate("thm2-commutator", format!("block maps σ₁, σ₂ of {} random quadruples and the matrix-unit quadruple commute: \"{THM2}\"", config.quadruples), Expected::Value(0.0), 1e-10),
            gate("thm2-reconstruction", format!("w σ₁(x)σ₂(y) v reproduces α₁(x)α₂(y): \"{THM2}\""), Expected::Value(0.0), 1e-10),
            gate("thm2-sigma-cb", format!("level estimates of ‖σ₁‖_cb, ‖σ₂‖_cb for contractive inputs are at most 1: \"{THM2}\""), Expected::Interval([0.0, 1.0]), 1e-8),
        ],
        thm2_construction,
    ));

    for &n in &dims {
        groups.push(Group::new(
            format!("gamma2-sqrt-n{n}"),
            vec![gate(format!("gamma2-sqrt-n{n}"), format!("γ₂ of the identity of ℓ∞^{n} is √{n}: \"{GAMMA2}\""), Expected::Value((n as f64).sqrt()), 5e-2)],
            move |opts, _| {
                let g = gamma2_linf(&ComplexMatrix::identity(n), opts)?;
                let mut s = Searches::default();
                s.see(&g);
                Ok(Measured::new(vec![vec![g.value]], s))
            },
        ));
    }

    let corpus = config.corpus_size;
    groups.push(Group::new(
        "sandwich-corpus",
        vec![
            gate("sandwich-mu", format!("largest excess of mu_lower over mu_upper on {corpus} corpus tensors: \"{SANDWICH}\""), Expected::Value(0.0), 1e-6),
            gate("sandwich-min", format!("largest excess of the minimal norm over mu_lower: \"{SANDWICH}\""), Expected::Value(0.0), 1e-8),
            gate("sandwich-dominance", format!("largest excess of mu_upper over min(h(t), h(ᵗt)): \"{SANDWICH}\""), Expected::Value(0.0), 1e-8),
            gate("sandwich-pairs", format!("largest excess of a normalized pair evaluation over mu_upper: \"{SANDWICH}\""), Expected::Value(0.0), 1e-6),
        ],
        sandwich_corpus,
    ));

    groups.push(Group::new(
        "three-fold",
        vec![gate("three-fold", format!("three-fold Haagerup norm of Σ e_i1⊗1⊗e_1i in column(2)⊗scalar⊗row(2) is 1: \"{THREE_FOLD}\""), Expected::Interval([1.0, 1.0 + 1e-3]), 1e-9)],
        |opts, _| {
            let spaces = [sp(StandardKind::Column(2)), sp(StandardKind::Scalar), sp(StandardKind::Row(2))];
            let coeffs = (0..4).map(|k| if k == 0 || k == 3 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }).collect();
            let h = haagerup3_upper(&Tensor3::new(spaces, coeffs)?, opts)?;
            let mut s = Searches::default();
            s.see(&h);
            Ok(Measured::new(vec![vec![h.value]], s))
        },
    ));

    for &n in &dims {
        let root = (n as f64).sqrt();
        groups.push(Group::new(
            format!("cb-row-column-n{n}"),
            vec![
                gate(format!("cb-row-column-closed-n{n}"), format!("closed-form ‖id: row({n}) → column({n})‖_cb is √{n}: \"{CB}\""), Expected::Value(root), 1e-2),
                gate(format!("cb-row-column-optimizer-n{n}"), format!("level-{n} estimate of ‖id: row({n}) → column({n})‖_cb is √{n}: \"{CB}\""), Expected::Value(root), 1e-2),
            ],
            move |opts, _| {
                let u = SpaceMap::new(sp(StandardKind::Row(n)), sp(StandardKind::Column(n)), ComplexMatrix::identity(n))?;
                let closed = cb_norm_hilbertian_domain(&u.images(), Hilbertian::Row)?;
                let level = level_norm(&u, smith_level(&u), opts)?;
                let mut s = Searches::default();
                s.see(&level);
                Ok(Measured::new(vec![vec![closed.value], vec![level.value]], s))
            },
        ));
    }

    groups.push(Group::new(
        "cb-transpose-level2",
        vec![gate("cb-transpose-level2", format!("level-2 estimate for the transpose map on full(2,2) is 2: \"{CB}\""), Expected::Value(2.0), 1e-2)],
        |opts, _| {
            let full = sp(StandardKind::Full(2, 2));
            let columns: Vec<Vec<C64>> = full.basis().iter().map(|b| full.coordinates(&b.transpose())).collect();
            let coeffs = ComplexMatrix::from_fn(4, 4, |j, i| columns[i][j]);
            let u = SpaceMap::new(full.clone(), full, coeffs)?;
            let level = level_norm(&u, 2, opts)?;
            let mut s = Searches::default();
            s.see(&level);
            Ok(Measured::new(vec![vec![level.value]], s))
        },
    ));

    groups.push(Group::new(
        "ineq9",
        vec![report_only("ineq9", format!("split factorization norm against the μ-norm of a random map R_2 → R_2, as [split/mu_upper, split, mu_upper, γ_R, γ_C]: \"{INEQ9}\""), Expected::Value(1.0), 2e-2)],
        |opts, _| {
            let (c2, r2) = (sp(StandardKind::Column(2)), sp(StandardKind::Row(2)));
            let c = gaussian_matrix(&mut stream(opts.seed, "ineq9", 0), 2, 2);
            let t = TensorElement::new(c2, r2.clone(), c.clone())?;
            let u = SpaceMap::new(r2.clone(), r2, c.transpose())?;
            let split = split_norm(&u, opts)?;
            let mu = mu_upper(&t, opts)?;
            let g_r = gamma_rc(&u, Hilbertian::Row, opts)?;
            let g_c = gamma_rc(&u, Hilbertian::Column, opts)?;
            let mut s = Searches::default();
            for e in [&split, &mu, &g_r, &g_c] {
                s.see(e);
            }
            let mut m = Measured::new(vec![vec![split.value / mu.value, split.value, mu.value, g_r.value, g_c.value]], s);
            m.notes[0] = Some("the factor-two comparison has no independent reference and is not checked".into());
            Ok(m)
        },
    ));

    groups
}

/// Ordered spaces the quadruples and the corpus draw from.
fn corpus_spaces() -> [SpaceRef; 4] {
    [sp(StandardKind::Row(2)), sp(StandardKind::Column(2)), sp(StandardKind::RowCap(2)), sp(StandardKind::Full(2, 2))]
}

fn thm2_construction(opts: &OptOptions, config: &SuiteConfig) -> Result<Measured> {
    let spaces = corpus_spaces();
    let mut quadruples = Vec::new();
    let mut index = 0u64;
    while quadruples.len() < config.quadruples && index < 50 * config.quadruples as u64 {
        let (l, r) = (&spaces[index as usize % 4], &spaces[(index as usize / 4) % 4]);
        if let Some(q) = random_quadruple(l, r, opts.seed, index, opts.max_pair_size) {
            quadruples.push((q.alpha1, q.alpha2, q.beta1, q.beta2));
        }
        index += 1;
    }
    let drawn = quadruples.len();
    // α₁ = e₁₂, α₂ = e₂₁, β₁ = β₂ = e₁₁ on one-dimensional spaces
    let scalar = sp(StandardKind::Scalar);
    let unit = |i, j| map_into_full(scalar.clone(), &[ComplexMatrix::unit(2, 2, i, j)]);
    quadruples.push((unit(0, 1)?, unit(1, 0)?, unit(0, 0)?, unit(0, 0)?));

    let level_opts = OptOptions {
        restarts: Some(opts.restarts.unwrap_or(BLOCK_LEVEL_RESTARTS)),
        iters: Some(opts.iters.unwrap_or(BLOCK_LEVEL_ITERS)),
        ..opts.clone()
    };
    let (mut commutator, mut reconstruction, mut sigma_cb) = (0.0f64, 0.0f64, 0.0f64);
    let mut searches = Searches::default();
    for (a1, a2, b1, b2) in &quadruples {
        let blocks = theorem2_blocks(a1, a2, b1, b2)?;
        commutator = commutator.max(blocks.commutator_residual());
        reconstruction = reconstruction.max(blocks.reconstruction_error(a1, a2));
        for sigma in [&blocks.sigma1, &blocks.sigma2] {
            let est = level_norm(sigma, smith_level(sigma), &level_opts)?;
            searches.see(&est);
            sigma_cb = sigma_cb.max(est.value);
        }
    }
    let mut m = Measured::new(vec![vec![commutator], vec![reconstruction], vec![sigma_cb]], searches);
    if drawn < config.quadruples {
        m.notes[0] = Some(format!("only {drawn} admissible random quadruples in {index} draws"));
    }
    Ok(m)
}

/// Violations `[lo − up, min − lo, up − h, pair − up]` of one corpus tensor.
type Violations = ([f64; 4], Searches);

fn sandwich_one(opts: &OptOptions, k: u64) -> Result<Violations> {
    let spaces = corpus_spaces();
    let mut rng = stream(opts.seed, "sandwich-corpus", k);
    let (e, f) = (spaces[rng.gen_range(0..4)].clone(), spaces[rng.gen_range(0..4)].clone());
    let c = gaussian_matrix(&mut rng, e.dim(), f.dim());
    let t = TensorElement::new(e.clone(), f.clone(), c)?;
    let up = mu_upper(&t, opts)?;
    let lo = mu_lower(&t, opts)?;
    let h = haagerup_upper(&t, opts)?;
    let ht = haagerup_upper(&t.transpose(), opts)?;
    let mut searches = Searches::default();
    for est in [&up, &h, &ht] {
        searches.see(est);
    }
    let mut pair: f64 = 0.0;
    for i in 0..PAIR_SAMPLES {
        let index = PAIR_INDEX_OFFSET + k * PAIR_SAMPLES + i;
        let samples = [
            commutant_sample(&e, &f, opts.seed, index, opts.max_pair_size),
            theorem2_sample(&e, &f, opts.seed, index, opts.max_pair_size),
        ];
        for s in samples.iter().flatten() {
            pair = pair.max(pair_eval(s, &t, true)?.1);
        }
    }
    let violations = [lo.value - up.value, t.min_norm() - lo.value, up.value - h.value.min(ht.value), pair - up.value];
    Ok((violations, searches))
}

fn sandwich_corpus(opts: &OptOptions, config: &SuiteConfig) -> Result<Measured> {
    let size = config.corpus_size as u64;
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(config.corpus_size);
    // tensors are independent; worker w takes k ≡ w (mod workers)
    let mut results: Vec<(u64, Result<Violations>)> = thread::scope(|s| {
        let handles: Vec<_> = (0..workers as u64)
            .map(|w| s.spawn(move || (w..size).step_by(workers).map(|k| (k, sandwich_one(opts, k))).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("corpus worker panicked")).collect()
    });
    results.sort_by_key(|(k, _)| *k);
    let mut worst = [0.0f64; 4];
    let mut searches = Searches::default();
    for (_, r) in results {
        let (v, s) = r?;
        for (w, x) in worst.iter_mut().zip(v) {
            // NaN propagates into the report instead of being dropped by max
            *w = if x.is_nan() { f64::NAN } else { w.max(x) };
        }
        searches.merge(s);
    }
    Ok(Measured::new(worst.iter().map(|&w| vec![w]).collect(), searches))
}
