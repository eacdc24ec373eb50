//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::PI;
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crflat::catalog::{list_families, Expectation, Form};
use crflat::expr::{DomainKind, ExprAst};
use crflat::invariants::{Label, TolProfile};
use crflat::jet::C64;
use crflat::mapar::{
    closed_form_residuals, final1_residuals, firstcur_check, liouville_residuals,
    monge_residual_1d, pq_validate, rho_jet_from_pq, OdeFamily, PQProfile, ParamPoint,
};
use crflat::rigid::{polystruct_residual, rigid_invariants, RigidPoint};
use crflat::tube::{tube_invariants, tube_invariants_from_jet, InvariantReport};
use crflat_cli::report::PointRecord;
use crflat_cli::{check, param, CheckArgs, CheckReport, GridArgs, ParamArgs, SourceArg, EXIT_OK};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn run_family(name: &str, params: &[(&str, f64)], grid: GridArgs) -> Result<CheckReport, String> {
    check(&CheckArgs {
        source: SourceArg::Family {
            name: name.into(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        },
        grid,
        order: 6,
        tol: TolProfile::default(),
        expect: None,
    })
    .map_err(|e| format!("{name}: {e}"))
}

fn evaluated(r: &CheckReport) -> impl Iterator<Item = &PointRecord> {
    r.points.iter().filter(|p| p.residuals.is_some())
}

fn c1_family_flatness() -> Outcome {
    let mut runs = vec![];
    for d in [0.5, 1.0, 2.0] {
        runs.push(("thm54_i", d));
        runs.push(("thm54_i_rigid", d));
    }
    for d in [0.25, 0.5, 0.75] {
        runs.push(("thm54_ii", d));
    }
    for d in [PI / 8.0, PI / 4.0, 3.0 * PI / 8.0] {
        runs.push(("thm54_iii", d));
    }
    let mut worst = [0.0_f64; 4];
    let mut min_s = f64::INFINITY;
    let mut n = 0;
    let mut specs: Vec<(&str, Vec<(&str, f64)>)> =
        runs.into_iter().map(|(f, d)| (f, vec![("D", d)])).collect();
    specs.push(("fk", vec![]));
    for (fam, params) in &specs {
        let r = run_family(fam, params, GridArgs::default())?;
        ensure(r.exit_code() == EXIT_OK, format!("{fam} {params:?}: exit {}", r.exit_code()))?;
        for p in evaluated(&r) {
            let res = p.residuals.unwrap();
            let j = p.j.ok_or(format!("{fam}: J missing"))?.scaled;
            let w = p.w.ok_or(format!("{fam}: W missing"))?.scaled;
            let s1111 = res.s1111.unwrap_or(0.0);
            let s = p.s.unwrap().abs();
            let at = format!("{fam} {params:?} point {}", p.index);
            ensure(j < 1e-8, format!("{at}: scaled |J| = {j:e}"))?;
            ensure(w < 1e-8, format!("{at}: scaled |W| = {w:e}"))?;
            ensure(res.ma.scaled < 1e-9, format!("{at}: MA residual {:e}", res.ma.scaled))?;
            ensure(s1111 < 1e-9, format!("{at}: s1111 residual {s1111:e}"))?;
            ensure(s > 1e-6, format!("{at}: |S| = {s:e}"))?;
            worst = [worst[0].max(j), worst[1].max(w), worst[2].max(res.ma.scaled), worst[3].max(s1111)];
            min_s = min_s.min(s);
            n += 1;
        }
    }
    Ok(format!(
        "{} runs, {n} points; max J {:.1e}, W {:.1e}, MA {:.1e}, s1111 {:.1e}; min |S| {:.3}",
        specs.len(),
        worst[0],
        worst[1],
        worst[2],
        worst[3],
        min_s
    ))
}

fn c2_light_cone() -> Outcome {
    let r = run_family(
        "lightcone_tube",
        &[],
        GridArgs {
            center: Some(vec![0.0, 0.0]),
            halfwidth: Some(0.1),
            n: Some(5),
        },
    )?;
    ensure(r.points.len() == 25, "grid is not 5x5")?;
    let mut worst = 0.0_f64;
    for p in &r.points {
        ensure(p.label() == Label::Flat, format!("point {} is {}", p.index, p.label))?;
        let m = p.residuals.unwrap().monge.scaled;
        ensure(m < 1e-8, format!("point {}: Monge residual {m:e}", p.index))?;
        worst = worst.max(m);
    }
    Ok(format!("25/25 flat, max Monge residual {worst:.1e}"))
}

fn c3_tube_rigid() -> Outcome {
    let rho = ExprAst::parse("2*t1^2/(t2+1)", DomainKind::Tube).map_err(|e| e.to_string())?;
    let f = ExprAst::parse("(z1+z1b)^2/(z2+z2b+1)", DomainKind::Rigid).map_err(|e| e.to_string())?;
    let tol = TolProfile::default();
    let mut worst = 0.0_f64;
    for k in 0..10 {
        let x = k as f64 / 9.0;
        let (t1, t2) = (-0.3 + 0.6 * x, 0.4 * (x * 7.0).sin());
        // F(z) = rho(2 Re z1, 2 Re z2) / 2; the imaginary parts are free.
        let z1 = C64::new(t1 / 2.0, 0.2 * (x * 5.0).cos());
        let z2 = C64::new(t2 / 2.0, -0.3 + 0.5 * x);
        let tb = tube_invariants(&rho, t1, t2, 6, &tol).map_err(|e| e.to_string())?;
        let rg = rigid_invariants(&f, RigidPoint::new(z1, z2), 6, &tol).map_err(|e| e.to_string())?;
        let pairs = [
            (rg.s_chain.s, tb.s_chain.s),
            (rg.j.unwrap().value, tb.j.unwrap().value),
            (rg.w.unwrap().value, tb.w.unwrap().value),
        ];
        for (name, (a, b)) in ["S", "J", "W"].iter().zip(pairs) {
            let d = (a - b).norm() / (1.0 + b.abs());
            ensure(d < 1e-9, format!("point {k}: {name} rigid {a} vs tube {b}"))?;
            worst = worst.max(d);
        }
    }
    Ok(format!("10 points, max discrepancy {worst:.1e}"))
}

fn fmt_coef(x: f64) -> String {
    format!("({x})")
}

/// Random polynomial profile: `p = sum c_k v^k` (k = 2..5), `q = sum b_k v^k`
/// (k = 1..5), coefficients in [-0.5, 0.5] with `|c_2|, b_1 >= 0.1`. The
/// variable is rescaled (`p(lv)/l^2`, `q(lv)/l`) until validation passes.
fn random_profile(rng: &mut ChaCha8Rng) -> (PQProfile, String, String) {
    loop {
        let c: Vec<f64> = (0..4).map(|_| rng.random_range(-0.5..=0.5)).collect();
        let mut b: Vec<f64> = (0..5).map(|_| rng.random_range(-0.5..=0.5)).collect();
        if c[0].abs() < 0.1 || b[0].abs() < 0.1 {
            continue;
        }
        if b[0] < 0.0 {
            b.iter_mut().for_each(|x| *x = -*x);
        }
        let mut lambda = 1.0_f64;
        for _ in 0..8 {
            let p = (0..4)
                .map(|i| format!("{}*v^{}", fmt_coef(c[i] * lambda.powi(i as i32)), i + 2))
                .collect::<Vec<_>>()
                .join("+");
            let q = (0..5)
                .map(|i| format!("{}*v^{}", fmt_coef(b[i] * lambda.powi(i as i32)), i + 1))
                .collect::<Vec<_>>()
                .join("+");
            let profile = PQProfile::parse(&p, &q).expect("profile parses");
            if pq_validate(&profile, 64).is_ok() {
                return (profile, p, q);
            }
            lambda /= 2.0;
        }
    }
}

/// Largest `|w|` at `v` keeping `q' - w p''` above half of `q'`, capped.
fn w_bound(profile: &PQProfile, v: f64, cap: f64) -> f64 {
    let p2 = profile.p_derivatives(v, 2).unwrap()[2];
    let q1 = profile.q_derivatives(v, 1).unwrap()[1];
    (0.5 * q1 / p2.abs()).min(cap)
}

fn tube_at_vw(profile: &PQProfile, v: f64, w: f64) -> Result<InvariantReport, String> {
    let pt = ParamPoint::from_vw(profile, v, w).map_err(|e| e.to_string())?;
    let jet = rho_jet_from_pq(profile, pt.t1, pt.t2, 6).map_err(|e| format!("({v}, {w}): {e}"))?;
    tube_invariants_from_jet(&jet, &TolProfile::default()).map_err(|e| e.to_string())
}

/// The 3x3 grid in (v, w) used for profile checks.
fn vw_grid(profile: &PQProfile) -> Vec<(f64, f64)> {
    let mut pts = vec![];
    for v in [-0.2, 0.0, 0.2] {
        let wb = w_bound(profile, v, 0.05);
        for w in [-wb, 0.0, wb] {
            pts.push((v, w));
        }
    }
    pts
}

fn c4_monge_ampere_parametrization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut max_ma, mut max_cf) = (0.0_f64, 0.0_f64);
    for k in 0..10 {
        let (profile, p, q) = random_profile(&mut rng);
        for (v, w) in vw_grid(&profile) {
            let r = tube_at_vw(&profile, v, w)?;
            let ma = r.residual_ma.scaled;
            ensure(ma < 1e-9, format!("profile {k} (p = {p}, q = {q}) at ({v}, {w}): MA {ma:e}"))?;
            max_ma = max_ma.max(ma);
        }
        for _ in 0..20 {
            let v = rng.random_range(-0.4..=0.4);
            let wb = w_bound(&profile, v, 0.1);
            let w = rng.random_range(-wb..=wb);
            let c = closed_form_residuals(&profile, v, w).map_err(|e| e.to_string())?;
            ensure(
                c.max_discrepancy < 1e-9,
                format!("profile {k} at ({v}, {w}): closed form {:?}", c.entries),
            )?;
            max_cf = max_cf.max(c.max_discrepancy);
        }
    }
    Ok(format!("10 profiles; max MA {max_ma:.1e}, max closed-form discrepancy {max_cf:.1e}"))
}

fn c5_w_vanishing() -> Outcome {
    let constant_ratio = [
        ("sqrt(1+v^2)-1", "v/sqrt(1+v^2)"),
        ("exp(v)-1-v", "2*(exp(v)-1)"),
        ("v^2/2+v^3/6", "3*(v+v^2/2)"),
    ];
    let mut max_flat = 0.0_f64;
    for (p, q) in constant_ratio {
        let profile = PQProfile::parse(p, q).map_err(|e| e.to_string())?;
        for (v, w) in vw_grid(&profile) {
            let r = tube_at_vw(&profile, v, w)?;
            let w_abs = r.w.ok_or("W missing")?.value.abs();
            ensure(w_abs < 1e-8, format!("p = {p} at ({v}, {w}): |W| = {w_abs:e}"))?;
            max_flat = max_flat.max(w_abs);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut min_w, mut max_rel) = (f64::INFINITY, 0.0_f64);
    let mut found = 0;
    while found < 5 {
        let (profile, p, _) = random_profile(&mut rng);
        let v = rng.random_range(-0.3..=0.3);
        let pd = profile.p_derivatives(v, 3).unwrap();
        let qd = profile.q_derivatives(v, 2).unwrap();
        let s1_num = pd[3] * qd[1] - pd[2] * qd[2];
        if s1_num.abs() <= 0.01 {
            continue;
        }
        let wb = w_bound(&profile, v, 0.05);
        let w = rng.random_range(-wb..=wb);
        let r = tube_at_vw(&profile, v, w)?;
        let wq = r.w.ok_or("W missing")?.value;
        ensure(wq.abs() > 1e-6, format!("p = {p} at ({v}, {w}): |W| = {:e}", wq.abs()))?;
        let expected = 6.0 * pd[2] * pd[2] * s1_num / (qd[1] - w * pd[2]).powi(5);
        let got = 3.0 * r.s_chain.s.powi(3) * wq;
        let rel = (got - expected).abs() / expected.abs();
        ensure(rel < 1e-8, format!("p = {p} at ({v}, {w}): 3 S^3 W = {got}, expected {expected}"))?;
        min_w = min_w.min(wq.abs());
        max_rel = max_rel.max(rel);
        found += 1;
    }
    Ok(format!(
        "constant ratio: max |W| {max_flat:.1e}; 5 random: min |W| {min_w:.2e}, 3S^3W rel. err {max_rel:.1e}"
    ))
}

fn param_args(p: &str, q: &str) -> ParamArgs {
    ParamArgs {
        p: p.into(),
        q: q.into(),
        grid_w: 0.1,
        grid_t: 0.05,
        n: 3,
        order: 6,
        samples: 64,
        tol: TolProfile::default(),
    }
}

fn c6_flat_tube_pipeline() -> Outcome {
    let (p, q) = ("sqrt(1+v^2)-1", "v/sqrt(1+v^2)");
    let profile = PQProfile::parse(p, q).map_err(|e| e.to_string())?;
    let p_ast = ExprAst::parse(p, DomainKind::Profile).map_err(|e| e.to_string())?;
    let (mut max_monge, mut max_final1) = (0.0_f64, 0.0_f64);
    for k in 0..=20 {
        let v = -0.5 + k as f64 / 20.0;
        let m = monge_residual_1d(&p_ast, v).map_err(|e| e.to_string())?;
        ensure(m.raw < 1e-10, format!("Monge residual {:e} at v = {v}", m.raw))?;
        max_monge = max_monge.max(m.raw);
        for (i, r) in final1_residuals(&profile, v).map_err(|e| e.to_string())?.iter().enumerate() {
            ensure(r.scaled < 1e-9, format!("final1[{i}] = {:e} at v = {v}", r.scaled))?;
            max_final1 = max_final1.max(r.scaled);
        }
    }
    let fc = firstcur_check(&profile, 64).map_err(|e| e.to_string())?;
    ensure(fc.max_deviation < 1e-12, format!("q'/p'' deviation {:e}", fc.max_deviation))?;
    let flat = param(&param_args(p, q)).map_err(|e| e.to_string())?;
    let labels: Vec<Label> = flat.points.iter().map(|p| p.tube.label()).collect();
    ensure(
        labels.contains(&Label::Flat)
            && labels.iter().all(|l| matches!(l, Label::Flat | Label::OutOfDomain)),
        format!("reconstructed tube labels {labels:?}"),
    )?;

    let (pc, qc) = ("v^4+v^2/2", "v");
    let control = PQProfile::parse(pc, qc).map_err(|e| e.to_string())?;
    let mut max_rel = 0.0_f64;
    for v in [-0.3, 0.1, 0.25, 0.4] {
        // direct substitution of p'' = 12v^2 + 1, p''' = 24v, p'''' = 24, p''''' = 0
        let (p2, p3, p4, p5) = (12.0 * v * v + 1.0, 24.0 * v, 24.0, 0.0);
        let oracle = 9.0 * p5 * p2 * p2 - 45.0 * p4 * p3 * p2 + 40.0 * p3 * p3 * p3;
        let got = final1_residuals(&control, v).map_err(|e| e.to_string())?[0].raw;
        let rel = (got - oracle.abs()).abs() / oracle.abs();
        ensure(rel < 1e-8, format!("quartic final1[0] at v = {v}: {got} vs {oracle}"))?;
        max_rel = max_rel.max(rel);
    }
    let quartic = param(&param_args(pc, qc)).map_err(|e| e.to_string())?;
    ensure(
        quartic.points.iter().any(|p| p.tube.label() == Label::Nonflat),
        "quartic control has no nonflat point",
    )?;
    Ok(format!(
        "Monge {max_monge:.1e}, final1 {max_final1:.1e}, q'/p'' dev {:.1e}, {} flat points; quartic rel. err {max_rel:.1e}",
        fc.max_deviation,
        labels.iter().filter(|l| **l == Label::Flat).count()
    ))
}

fn c7_polystruct() -> Outcome {
    let mut checked = 0;
    let mut worst = 0.0_f64;
    let mut names = vec![];
    for fam in list_families() {
        if fam.form != Form::Rigid || fam.expected != Expectation::Flat {
            continue;
        }
        names.push(fam.name);
        let r = run_family(fam.name, &[], GridArgs::default())?;
        for p in evaluated(&r) {
            let res = p.residuals.unwrap();
            if res.monge.scaled < 1e-9 {
                let ps = res.polystruct.ok_or("polystruct missing")?;
                ensure(ps < 1e-9, format!("{} point {}: polystruct {ps:e}", fam.name, p.index))?;
                worst = worst.max(ps);
                checked += 1;
            }
        }
    }
    ensure(checked > 0, "no point satisfied the complex Monge equation")?;
    let control = ExprAst::parse("z1*z1b+(z1*z1b)^3", DomainKind::Rigid).map_err(|e| e.to_string())?;
    let point = RigidPoint::new(C64::new(0.3, 0.0), C64::new(0.0, 0.0));
    let c = polystruct_residual(&control, point, 6, &TolProfile::default()).map_err(|e| e.to_string())?;
    ensure(c > 1e-3, format!("control polystruct {c:e}"))?;
    Ok(format!(
        "{} families, {checked} points, max {worst:.1e}; control {c:.3e}",
        names.len()
    ))
}

fn c8_liouville() -> Outcome {
    let p = |kv: &[(&str, f64)]| kv.iter().map(|(k, v)| (k.to_string(), *v)).collect::<Vec<_>>();
    let cases = [
        ("case1", p(&[("D", 1.0)])),
        ("case1", p(&[("sigma", -1.0), ("D", 0.4)])),
        ("case2", p(&[("C", 0.5), ("D", 0.3)])),
        ("case3", p(&[("C", -0.5), ("D", 0.6)])),
        ("reinhardt", p(&[("beta", 0.3)])),
        ("reinhardt", p(&[("beta", -0.5)])),
    ];
    let mut worst = 0.0_f64;
    for (name, params) in &cases {
        let fam = OdeFamily::from_params(name, params).map_err(|e| e.to_string())?;
        let xs = fam.sample_points(8);
        ensure(xs.len() == 8, "expected 8 samples")?;
        for x in xs {
            let r = liouville_residuals(&fam, x).map_err(|e| format!("{name}: {e}"))?;
            for (what, res) in [("second order", r.second_order), ("first integral", r.first_integral)] {
                ensure(res.raw < 1e-10, format!("{name} {params:?} x = {x}: {what} {:e}", res.raw))?;
                worst = worst.max(res.raw);
            }
        }
    }
    Ok(format!("{} families x 8 samples, max residual {worst:.1e}", cases.len()))
}

/// Random smooth expression in t1, t2 of bounded depth.
fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> String {
    if depth == 0 || rng.random_bool(0.25) {
        return match rng.random_range(0..3) {
            0 => "t1".into(),
            1 => "t2".into(),
            _ => format!("{:.3}", rng.random_range(0.5..2.0)),
        };
    }
    let a = random_expr(rng, depth - 1);
    match rng.random_range(0..11) {
        0 => format!("({a})+({})", random_expr(rng, depth - 1)),
        1 => format!("({a})-({})", random_expr(rng, depth - 1)),
        2 | 3 => format!("({a})*({})", random_expr(rng, depth - 1)),
        4 => format!("({a})/(1+({})^2)", random_expr(rng, depth - 1)),
        5 => format!("exp(0.5*sin({a}))"),
        6 => format!("sin({a})"),
        7 => format!("cos({a})"),
        8 => format!("sqrt(1+({a})^2)"),
        9 => format!("log(2+sin({a}))"),
        _ => format!("({a})^{}", rng.random_range(2..4)),
    }
}

/// Central-difference weights for the k-th derivative, O(h^2) accurate.
fn stencil(k: usize) -> &'static [(i32, f64)] {
    match k {
        0 => &[(0, 1.0)],
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        _ => unreachable!(),
    }
}

fn fd_partial(f: &dyn Fn(f64, f64) -> f64, x: f64, y: f64, a: usize, b: usize, h: f64) -> f64 {
    let mut sum = 0.0;
    for &(i, wi) in stencil(a) {
        for &(j, wj) in stencil(b) {
            sum += wi * wj * f(x + i as f64 * h, y + j as f64 * h);
        }
    }
    sum / h.powi((a + b) as i32)
}

fn c9_jet_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0_f64;
    for k in 0..200 {
        let text = random_expr(&mut rng, 4);
        let ast = ExprAst::parse(&text, DomainKind::Tube).map_err(|e| format!("{text}: {e}"))?;
        let (x, y) = (rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
        let jet = ast
            .eval_jet(&crflat::expr::EvalDomain::tube(x, y), 3)
            .map_err(|e| format!("{text}: {e}"))?;
        let f = |a: f64, b: f64| ast.eval_scalar_at(&[C64::new(a, 0.0), C64::new(b, 0.0)]).unwrap().re;
        for a in 0..=3 {
            for b in 0..=3 - a {
                let exact = jet.d(&[a, b]).unwrap().re;
                let (d1, d2) = (fd_partial(&f, x, y, a, b, 1e-2), fd_partial(&f, x, y, a, b, 5e-3));
                let fd = (4.0 * d2 - d1) / 3.0;
                let rel = (fd - exact).abs() / exact.abs().max(1.0);
                ensure(rel < 1e-5, format!("expr {k} {text} at ({x}, {y}) d[{a},{b}]: jet {exact}, fd {fd}"))?;
                worst = worst.max(rel);
            }
        }
    }

    let mut poly_worst = 0.0_f64;
    for _ in 0..50 {
        let mut coefs = vec![];
        for i in 0..=5usize {
            for j in 0..=5 - i {
                coefs.push((i, j, rng.random_range(-1.0..1.0_f64)));
            }
        }
        let text = coefs
            .iter()
            .map(|(i, j, c)| format!("({c})*t1^{i}*t2^{j}"))
            .collect::<Vec<_>>()
            .join("+");
        let ast = ExprAst::parse(&text, DomainKind::Tube).map_err(|e| e.to_string())?;
        let (x, y) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let jet = ast.eval_jet(&crflat::expr::EvalDomain::tube(x, y), 5).map_err(|e| e.to_string())?;
        let falling = |n: usize, k: usize| ((n - k + 1)..=n).map(|m| m as f64).product::<f64>();
        for a in 0..=5usize {
            for b in 0..=5 - a {
                let exact: f64 = coefs
                    .iter()
                    .filter(|(i, j, _)| *i >= a && *j >= b)
                    .map(|(i, j, c)| {
                        c * falling(*i, a) * falling(*j, b) * x.powi((i - a) as i32) * y.powi((j - b) as i32)
                    })
                    .sum();
                let got = jet.d(&[a, b]).unwrap().re;
                let rel = (got - exact).abs() / exact.abs().max(1.0);
                ensure(rel < 1e-13, format!("polynomial d[{a},{b}]: {got} vs {exact}"))?;
                poly_worst = poly_worst.max(rel);
            }
        }
    }
    Ok(format!("200 expressions, max rel. err {worst:.1e}; 50 polynomials, max {poly_worst:.1e}"))
}

fn c10_determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_crflat"))
            .args(["check", "--family", "thm54_ii"])
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(a.status.code() == Some(0), format!("exit {:?}", a.status.code()))?;
    ensure(!a.stdout.is_empty(), "empty output")?;
    ensure(a.stdout == b.stdout, "outputs differ")?;
    Ok(format!("{} bytes identical", a.stdout.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("classified-family flatness", c1_family_flatness),
        ("light-cone tube", c2_light_cone),
        ("tube/rigid consistency", c3_tube_rigid),
        ("Monge-Ampere parametrization", c4_monge_ampere_parametrization),
        ("W vanishing both directions", c5_w_vanishing),
        ("flat tube pipeline", c6_flat_tube_pipeline),
        ("complex Monge structure", c7_polystruct),
        ("Liouville families", c8_liouville),
        ("jet kernel oracle", c9_jet_oracle),
        ("determinism", c10_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
