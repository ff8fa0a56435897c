//! One function per subcommand. Each writes its artifacts under the output
//! directory and returns a short summary for stdout.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use wbl_core::bergman::{density_scan, gram_matrix, Frame};
use wbl_core::certs::{
    cos_half_norm_enclosure, norm_budget, nondensity_certificate, poisson_bounds_check, poisson_extension,
    poisson_samples, potential_mass_bound,
};
use wbl_core::geometry::moon_tangency;
use wbl_core::moon::{example18_stage, moon_density_criterion, strip_budget_search};
use wbl_core::{Domain, Error, Shape};

use crate::config::{ExperimentConfig, TargetTag};

/// Exit-code classes.
#[derive(Debug)]
pub enum Failure {
    Config(anyhow::Error),
    Numerical(anyhow::Error),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Config(_) => 1,
            Failure::Numerical(_) => 2,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Config(e) | Failure::Numerical(e) => e,
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Config(e)
    }
}

/// Parameter errors surfacing mid-run are still the config's fault.
fn numerical(e: Error) -> Failure {
    match e {
        Error::InvalidDomain(_)
        | Error::InvalidParameters(_)
        | Error::OutOfRange(_)
        | Error::TangencyNotFound { .. }
        | Error::CutIntersectsDomain(_)
        | Error::UnsupportedGrowth(_)
        | Error::UnsupportedMeasure(_)
        | Error::MassTooLarge(_) => Failure::Config(e.into()),
        _ => Failure::Numerical(e.into()),
    }
}

pub struct Run {
    pub config: ExperimentConfig,
    pub out: PathBuf,
    pub seed: Option<u64>,
}

type Outcome = Result<String, Failure>;

fn cj(z: Complex64) -> Value {
    json!([z.re, z.im])
}

impl Run {
    fn config_json(&self) -> String {
        serde_json::to_string(&self.config).expect("config serializes")
    }

    fn write(&self, name: &str, body: &str) -> Result<PathBuf, Failure> {
        std::fs::create_dir_all(&self.out)
            .with_context(|| format!("creating {}", self.out.display()))
            .map_err(Failure::Numerical)?;
        let path = self.out.join(name);
        std::fs::write(&path, body)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(Failure::Numerical)?;
        Ok(path)
    }

    /// `#` lines with the command, the resolved config and anything extra.
    fn csv_header(&self, command: &str, extra: &[(&str, String)]) -> String {
        let mut s = format!("# wbl {command}\n# config: {}\n", self.config_json());
        for (k, v) in extra {
            let _ = writeln!(s, "# {k}: {v}");
        }
        s
    }

    fn write_json(&self, name: &str, command: &str, mut report: Value) -> Result<PathBuf, Failure> {
        let obj = report.as_object_mut().expect("reports are objects");
        obj.insert("command".into(), json!(command));
        obj.insert("config".into(), serde_json::to_value(&self.config).expect("config serializes"));
        let text = serde_json::to_string_pretty(&report).expect("report serializes");
        self.write(name, &(text + "\n"))
    }

    fn domain_frame(&self) -> Result<(Domain, Frame), Failure> {
        let d = self.config.domain()?;
        let f = self.config.frame(&d)?;
        Ok((d, f))
    }

    pub fn gram(&self) -> Outcome {
        let (domain, frame) = self.domain_frame()?;
        let weight = self.config.weight.build()?;
        let n = self.config.n_max()?;
        let g = gram_matrix(&domain, &weight, &frame, n, &self.config.quad.bergman()).map_err(numerical)?;
        let mut extra = vec![
            ("frame", format!("center {} scale {}", frame.center, frame.scale)),
            ("quad_error_budget", format!("{:e}", g.error_budget)),
            ("cond_estimate", format!("{:e}", g.cond_estimate)),
            ("ill_conditioned", g.ill_conditioned.to_string()),
            ("positive_definite", g.positive_definite.to_string()),
        ];
        if let Some(seed) = self.seed {
            let e = monte_carlo_gram_discrepancy(&domain, &weight, &frame, n + 1, &|a, b| g.matrix[(a, b)], seed);
            extra.push(("monte_carlo_seed", seed.to_string()));
            extra.push(("monte_carlo_max_rel_discrepancy", format!("{e:e}")));
        }
        let mut s = self.csv_header("gram", &extra);
        s.push_str("j,k,re,im\n");
        for j in 0..=n {
            for k in 0..=n {
                let z = g.matrix[(j, k)];
                let _ = writeln!(s, "{j},{k},{:e},{:e}", z.re, z.im);
            }
        }
        let path = self.write("gram.csv", &s)?;
        Ok(format!(
            "gram N={n}: cond {:e}, error budget {:e} -> {}",
            g.cond_estimate,
            g.error_budget,
            path.display()
        ))
    }

    pub fn density_scan(&self) -> Outcome {
        let (domain, frame) = self.domain_frame()?;
        let weight = self.config.weight.build()?;
        let n = self.config.n_max()?;
        let tag = self.config.target_tag()?;
        let spec = match tag {
            TargetTag::InvSqrt => Some(self.config.branch(&domain)?),
            _ => None,
        };
        let target = tag.target(spec.as_ref())?;
        let scan = density_scan(&target, &domain, &weight, &frame, n, &self.config.quad.bergman()).map_err(numerical)?;
        let r = &scan.result;
        let mut s = self.csv_header(
            "density-scan",
            &[
                ("frame", format!("center {} scale {}", frame.center, frame.scale)),
                ("quad_error_budget", format!("{:e}", r.error_budget)),
                ("cond_estimate", format!("{:e}", r.cond_estimate)),
                ("ill_conditioned", r.ill_conditioned.to_string()),
                ("grid", format!("level {} nodes {}", r.grid_level, r.grid_nodes)),
                ("verdict", scan.verdict.to_string()),
            ],
        );
        s.push_str("n,d_n,err_budget\n");
        for (i, (d, b)) in scan.distances.iter().zip(&scan.budgets).enumerate() {
            let _ = writeln!(s, "{},{:e},{:e}", r.first_degree + i, d, b);
        }
        let path = self.write("density_scan.csv", &s)?;
        Ok(format!(
            "density-scan N={n}: d_0 {:e}, d_N {:e}, {} -> {}",
            scan.distances[0],
            scan.distances[scan.distances.len() - 1],
            scan.verdict,
            path.display()
        ))
    }

    pub fn moon_criterion(&self) -> Outcome {
        let (domain, frame) = self.domain_frame()?;
        let weight = self.config.weight.build()?;
        let n = self.config.n_max()?;
        let spec = self.config.branch(&domain)?;
        let rep = moon_density_criterion(&domain, &weight, &spec, &frame, n, &self.config.quad.bergman())
            .map_err(numerical)?;
        let budget = rep.budgets.iter().copied().fold(0.0, f64::max);
        let mut s = self.csv_header(
            "moon-criterion",
            &[
                ("quad_error_budget", format!("{budget:e}")),
                ("verdict", rep.verdict.to_string()),
                ("control_pole", rep.control_pole.to_string()),
                ("control_verdict", rep.control_verdict.to_string()),
            ],
        );
        s.push_str("n,d_n,err_budget,control_d_n\n");
        for i in 0..rep.distances.len() {
            let _ = writeln!(
                s,
                "{i},{:e},{:e},{:e}",
                rep.distances[i], rep.budgets[i], rep.control_distances[i]
            );
        }
        self.write("moon_criterion.csv", &s)?;
        let tangency = match domain.shape() {
            Shape::Moon { .. } => {
                let t = moon_tangency(&domain, self.config.moon.probe_radius).map_err(numerical)?;
                json!({"Q": cj(t.q), "C": t.c, "min_ratio": t.min_ratio,
                       "probe": {"c": cj(t.probe.center), "r": t.probe.radius}, "samples": t.samples})
            }
            _ => Value::Null,
        };
        let path = self.write_json(
            "moon_criterion.json",
            "moon-criterion",
            json!({
                "criterion": rep.criterion,
                "cut_direction": cj(spec.direction()),
                "distances": rep.distances,
                "budgets": rep.budgets,
                "quad_error_budget": budget,
                "verdict": rep.verdict.label(),
                "control_pole": cj(rep.control_pole),
                "control_distances": rep.control_distances,
                "control_verdict": rep.control_verdict.label(),
                "verdicts_are_heuristic": true,
                "tangency": tangency,
            }),
        )?;
        Ok(format!(
            "moon-criterion N={n}: 1/sqrt(z) {}, control {} -> {}",
            rep.verdict,
            rep.control_verdict,
            path.display()
        ))
    }

    pub fn certify(&self) -> Outcome {
        let c = &self.config.certify;
        let quad = self.config.quad.quad();
        let (m, enclosure) = match c.m {
            Some(m) => (m, Value::Null),
            None => {
                let enc = cos_half_norm_enclosure(c.p, c.radius, &quad).map_err(numerical)?;
                let v = json!({"radius": c.radius, "lower": enc.lower, "upper": enc.upper,
                               "truncated": enc.truncated.value, "truncated_err": enc.truncated.err, "tail": enc.tail});
                (norm_budget(&enc), v)
            }
        };
        let cert = nondensity_certificate(c.p, m).map_err(numerical)?;
        let samples = poisson_samples(c.poisson_samples);
        let poisson = poisson_bounds_check(c.p, &samples, 1e-9).map_err(numerical)?;
        let zero = Complex64::new(0.0, 0.0);
        let potential = potential_mass_bound(&[1.0], &[zero], &Domain::unit_disc(), 1e-8).map_err(numerical)?;
        let path = self.write_json(
            "certify.json",
            "certify",
            json!({
                "p": cert.p,
                "M": cert.m,
                "C_p": cert.c_p,
                "C_1": cert.c_1,
                "Y": cert.y,
                "epsilon0_sq": cert.epsilon0_sq,
                "log_epsilon0_sq": cert.log_epsilon0_sq,
                "r_star": cert.r_star,
                "enclosure": enclosure,
                "checks": {
                    "gap_samples": cert.gap_samples,
                    "poisson": {
                        "samples": poisson.samples,
                        "min_lower_ratio": poisson.min_lower_ratio,
                        "max_upper_ratio": poisson.max_upper_ratio,
                    },
                    "potential": {
                        "integral": potential.integral,
                        "err": potential.err,
                        "lebesgue_bound": potential.lebesgue_bound,
                    },
                },
            }),
        )?;
        Ok(format!(
            "certify p={} M={}: C_p {:.6}, C_1 {:.6}, Y {:.4}, ln epsilon0^2 {:.4} -> {}",
            cert.p,
            cert.m,
            cert.c_p,
            cert.c_1,
            cert.y,
            cert.log_epsilon0_sq,
            path.display()
        ))
    }

    pub fn poisson_check(&self) -> Outcome {
        let c = &self.config.poisson;
        let tol = self.config.quad.tol.max(1e-12);
        let mut samples = poisson_samples(c.samples);
        for pt in &c.points {
            if !(pt[1] > 0.0) {
                return Err(Failure::Config(anyhow!("poisson point {pt:?} must have y > 0")));
            }
            samples.push((pt[0], pt[1]));
        }
        let rep = poisson_bounds_check(c.p, &samples, tol).map_err(numerical)?;
        let u01 = poisson_extension(c.p, 0.0, 1.0, tol).map_err(numerical)?;
        let values = samples
            .iter()
            .map(|&(x, y)| poisson_extension(c.p, x, y, tol).map(|u| json!([x, y, u])))
            .collect::<Result<Vec<_>, _>>()
            .map_err(numerical)?;
        let path = self.write_json(
            "poisson.json",
            "poisson-check",
            json!({
                "p": rep.p,
                "C_p": rep.c_p,
                "tol": tol,
                "U_0_1": u01,
                "samples": rep.samples,
                "violations": 0,
                "min_lower_ratio": rep.min_lower_ratio,
                "max_upper_ratio": rep.max_upper_ratio,
                "values": values,
            }),
        )?;
        Ok(format!(
            "poisson-check p={}: U(0,1) {u01:.12}, {} samples, no violations -> {}",
            rep.p,
            rep.samples,
            path.display()
        ))
    }

    pub fn potential_check(&self) -> Outcome {
        let spec = self.config.potential.as_ref().ok_or_else(|| anyhow!("config has no potential section"))?;
        let domain = match &self.config.domain {
            Some(d) => d.build()?,
            None => Domain::unit_disc(),
        };
        let alphas: Vec<f64> = spec.atoms.iter().map(|a| a.alpha).collect();
        let points: Vec<Complex64> = spec.atoms.iter().map(|a| Complex64::new(a.z[0], a.z[1])).collect();
        let rep = potential_mass_bound(&alphas, &points, &domain, self.config.quad.tol).map_err(numerical)?;
        let path = self.write_json(
            "potential.json",
            "potential-check",
            json!({
                "integral": rep.integral,
                "err": rep.err,
                "quad_error_budget": rep.err,
                "total_mass": rep.total_mass,
                "radius": rep.radius,
                "bound": rep.radial_bound,
                "lebesgue_bound": rep.lebesgue_bound,
                "holds": rep.integral <= rep.lebesgue_bound + rep.err,
            }),
        )?;
        Ok(format!(
            "potential-check: integral {:.10} <= {:.10} -> {}",
            rep.integral,
            rep.lebesgue_bound,
            path.display()
        ))
    }

    pub fn moon_stage(&self) -> Outcome {
        let st = self.config.stage.as_ref().ok_or_else(|| anyhow!("config has no stage section"))?;
        let weight = self.config.weight.build()?;
        let res = strip_budget_search(st.k, &st.prior_alphas, &weight, st.degree, &self.config.quad.bergman())
            .map_err(numerical)?;
        let stage = example18_stage(st.k, &res.alphas).map_err(numerical)?;
        let bbox = |d: &Domain| {
            let b = d.bounding_box();
            json!([b.x_min, b.x_max, b.y_min, b.y_max])
        };
        let coeffs: Vec<Value> = res.poly.taylor_coefficients().into_iter().map(cj).collect();
        let path = self.write_json(
            "moon_stage.json",
            "moon-stage",
            json!({
                "k": res.k,
                "degree": res.degree,
                "alphas": res.alphas,
                "domain_error": res.domain_error,
                "sup_on_strip": res.sup_on_strip,
                "strip_mass": res.strip_mass,
                "strip_bound": res.strip_bound,
                "target": res.target,
                "halvings": res.halvings,
                "domain_bbox": bbox(&stage.domain),
                "strip_bbox": bbox(&stage.strip),
                "poly_taylor": coeffs,
            }),
        )?;
        Ok(format!(
            "moon-stage k={}: alpha_k {:e}, strip bound {:e} < {:e} -> {}",
            res.k,
            res.alphas[res.alphas.len() - 1],
            res.strip_bound,
            res.target,
            path.display()
        ))
    }
}

/// Largest `|G - G_mc| / sqrt(G_jj G_kk)` against a stratified Monte-Carlo Gram
/// matrix. Only weights bounded on the domain are meaningful here.
fn monte_carlo_gram_discrepancy(
    domain: &Domain,
    weight: &wbl_core::Weight,
    frame: &Frame,
    n: usize,
    g: &dyn Fn(usize, usize) -> Complex64,
    seed: u64,
) -> f64 {
    const CELLS: usize = 300;
    let bb = domain.bounding_box();
    let hx = (bb.x_max - bb.x_min) / CELLS as f64;
    let hy = (bb.y_max - bb.y_min) / CELLS as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mc = vec![Complex64::new(0.0, 0.0); n * n];
    let mut pw = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..CELLS {
        for j in 0..CELLS {
            let z = Complex64::new(
                bb.x_min + hx * (i as f64 + rng.gen::<f64>()),
                bb.y_min + hy * (j as f64 + rng.gen::<f64>()),
            );
            if !domain.contains(z) {
                continue;
            }
            let w = (-weight.evaluate(z)).exp() * hx * hy;
            let t = (z - frame.center) / frame.scale;
            let mut acc = Complex64::new(1.0, 0.0);
            for v in pw.iter_mut() {
                *v = acc;
                acc *= t;
            }
            for a in 0..n {
                for b in 0..n {
                    mc[a * n + b] += pw[a] * pw[b].conj() * w;
                }
            }
        }
    }
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let s = (g(a, a).re * g(b, b).re).sqrt();
            worst = worst.max((g(a, b) - mc[a * n + b]).norm() / s);
        }
    }
    worst
}

pub fn default_out(config: &ExperimentConfig, flag: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| config.out.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}
