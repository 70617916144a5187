//! Cross-validation of the estimators against each other.

use std::fmt;

use hnoma::analytic::{compute_constants, p_t_asymptotic, p_t_breakdown, ExactOptions};
use hnoma::channel::OrderPairDensity;
use hnoma::numerics::Stream;
use hnoma::prob::{estimate_decomposition, integrate_event, EventRegion, IntegrateOptions};
use hnoma::schemes::{energy, noma_rate};
use hnoma::{Scheme, SystemConfig};

use crate::spec::SweepSpec;
use crate::CliError;

/// Knobs of a validation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidateOptions {
    pub trials: u64,
    pub seed: u64,
    pub n_c: usize,
    /// Negative control: relative perturbation of `β` seen only by the
    /// closed-form engines.
    pub corrupt_beta: f64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self { trials: 1_000_000, seed: 7, n_c: 256, corrupt_beta: 0.0 }
    }
}

/// One named check at one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub invariant: &'static str,
    pub context: String,
    pub regime: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {:<26} {:<34} regime={:<12} {}", self.invariant, self.context, self.regime, self.detail)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// The configurations checked when no document is given: one per table
/// family plus a high-`η` case.
pub fn default_specs() -> Vec<SweepSpec> {
    let base = |name: &str, m, n, rate_m, eta| SweepSpec {
        name: name.into(),
        users: 5,
        m,
        n,
        rate_m,
        beta: 0.25,
        eta,
        snr_db: vec![10.0, 20.0, 30.0],
        schemes: vec![crate::spec::Quantity::PowerAdaptation],
        methods: vec![hnoma::prob::Method::Exact],
        trials: 1,
        n_c: 256,
        seed: 1,
    };
    vec![base("m1-n2", 1, 2, 0.2, 1.0), base("m2-n1", 2, 1, 0.35, 1.0), base("m2-n5-eta8", 2, 5, 1.0, 8.0)]
}

fn perturbed(cfg: &SystemConfig, rel: f64) -> SystemConfig {
    let mut c = *cfg;
    c.beta *= 1.0 + rel;
    c
}

/// Run every invariant on every grid point of `specs`.
pub fn run_validation(specs: &[SweepSpec], opts: &ValidateOptions) -> Result<Report, CliError> {
    let mut report = Report::default();
    for spec in specs {
        spec.validate()?;
        for &snr in &spec.snr_db {
            let cfg = spec.config(snr)?;
            let context = format!("{} @ {snr} dB", spec.label());
            let regime = compute_constants(&cfg).map(|c| c.regime_tag(cfg.m < cfg.n)).unwrap_or_default();
            let mut push = |invariant, passed, detail: String| {
                report.checks.push(Check {
                    invariant,
                    context: context.clone(),
                    regime: regime.clone(),
                    passed,
                    detail,
                })
            };
            let engine_cfg = perturbed(&cfg, opts.corrupt_beta);
            let exact = p_t_breakdown(&engine_cfg, &ExactOptions { n_c: opts.n_c, ..Default::default() });
            let pair = OrderPairDensity::new(cfg.users, cfg.m, cfg.n).map_err(|e| CliError::Config(e.to_string()))?;
            let iopts = IntegrateOptions { abs_tol: 1e-14, rel_tol: 1e-9, ..Default::default() };
            let integrated = integrate_event(&EventRegion::power_adaptation(&cfg), &pair, &iopts);

            match (&exact, &integrated) {
                (Ok(e), Ok(i)) => {
                    let diff = (e.value - i.value).abs();
                    let ok = diff <= 1e-5 && diff <= 1e-6 * i.value.abs() + 1e-15;
                    push(
                        "exact-vs-integration",
                        ok,
                        format!("exact={:.6e} integration={:.6e} diff={diff:.2e}", e.value, i.value),
                    );
                }
                (Err(err), _) | (_, Err(err)) => {
                    push("exact-vs-integration", false, format!("evaluation failed: {err}"))
                }
            }

            match (&exact, estimate_decomposition(&cfg, opts.trials, opts.seed)) {
                (Ok(e), Ok(d)) => {
                    let mc = d.estimate(d.power_adaptation());
                    let ok = mc.consistent_with(e.value, 3.0);
                    push(
                        "exact-vs-mc",
                        ok,
                        format!("exact={:.6e} mc={:.6e} std_err={:.2e}", e.value, mc.value, mc.std_err),
                    );
                    let worst = d
                        .subevents
                        .iter()
                        .map(|&(label, hits)| {
                            let est = d.estimate(hits);
                            let target = e.subevent(label);
                            let sigma = est.std_err.max(1.0 / d.trials as f64);
                            ((est.value - target).abs() / sigma, label)
                        })
                        .fold((0.0, ""), |a, b| if b.0 > a.0 { b } else { a });
                    push(
                        "subevents-vs-mc",
                        worst.0 <= 4.0,
                        format!("largest deviation {:.2} std_err in {}", worst.0, worst.1),
                    );
                    let partition = d.type_one + d.no_budget + d.power_adaptation() == d.total;
                    push("failure-partition", partition, format!("{} failures split into buckets", d.total));
                }
                (Err(err), _) => push("exact-vs-mc", false, format!("exact evaluation failed: {err}")),
                (_, Err(err)) => push("exact-vs-mc", false, format!("simulation failed: {err}")),
            }

            let (dominance, energy_cap) = per_draw_checks(&cfg, opts.trials.min(200_000), opts.seed);
            push("rate-dominance", dominance == 0, format!("{dominance} violations"));
            push("energy-bound", energy_cap == 0, format!("{energy_cap} violations"));
        }

        // high-SNR agreement at 45 dB for the same curve
        let cfg = spec.config(45.0)?;
        let engine_cfg = perturbed(&cfg, opts.corrupt_beta);
        let context = format!("{} @ 45 dB", spec.label());
        let regime = compute_constants(&cfg).map(|c| c.regime_tag(cfg.m < cfg.n)).unwrap_or_default();
        let (passed, detail) = match (
            p_t_asymptotic(&engine_cfg),
            integrate_event(
                &EventRegion::power_adaptation(&cfg),
                &OrderPairDensity::new(cfg.users, cfg.m, cfg.n).map_err(|e| CliError::Config(e.to_string()))?,
                &IntegrateOptions { abs_tol: 1e-300, rel_tol: 1e-9, ..Default::default() },
            ),
        ) {
            (Ok(a), Ok(i)) if i.value > 0.0 => {
                let ratio = a.value / i.value;
                ((ratio - 1.0).abs() < 0.05, format!("asymptotic/reference={ratio:.4}"))
            }
            (Ok(a), Ok(_)) => (a.value == 0.0, format!("reference is zero, asymptotic={:.3e}", a.value)),
            (Err(e), _) | (_, Err(e)) => (false, format!("evaluation failed: {e}")),
        };
        report.checks.push(Check { invariant: "asymptotic-convergence", context, regime, passed, detail });
    }
    Ok(report)
}

/// Counts of draws violating rate ordering and energy bounds.
fn per_draw_checks(cfg: &SystemConfig, draws: u64, seed: u64) -> (u64, u64) {
    let mut stream = Stream::new(seed, u64::MAX);
    let mut gains = vec![0.0; cfg.users];
    let (mut order, mut cap) = (0, 0);
    for _ in 0..draws {
        gains.iter_mut().for_each(|g| *g = stream.exp1());
        gains.sort_unstable_by(f64::total_cmp);
        let (g_m, g_n) = (gains[cfg.m - 1], gains[cfg.n - 1]);
        let [f, npa, pa] = Scheme::NOMA.map(|s| noma_rate(cfg, g_m, g_n, s));
        let tol = 1e-12;
        if pa.total_rate() < npa.total_rate() - tol || npa.total_rate() < f.total_rate() - tol {
            order += 1;
        }
        let e = energy(cfg, &pa);
        if e > 2.0 * cfg.beta * cfg.rho_n * (1.0 + tol) || e >= cfg.rho_n {
            cap += 1;
        }
    }
    (order, cap)
}
