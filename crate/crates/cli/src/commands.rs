//! One function per subcommand, each turning resolved inputs into an [`Emission`].

use serde_json::{json, Map, Value};

use dsw_core::expansion::{
    assembled_approximant, decompose_hypergeometric, first_order_correction_audit, order1,
    order1_series, residual_scaling_slope, ExpansionParams,
};
use dsw_core::model::{potential_profile, HorizonUnitsParams};
use dsw_core::oracle::{classify_singularities, parse_fixture, OdeTolerance};
use dsw_core::reflection::{
    check_regime, horizon_flux_balance_with, reflection_report, DEFAULT_MARGIN,
};
use dsw_core::waves::{
    connect, connection_residual, flat_limit_convergence, make_ansatz, wave_profile, Family,
    FlatSweep, WaveKind,
};
use dsw_core::DswError;

use crate::config::KindArg;
use crate::emit::{Cell, Emission, Record};
use crate::Failure;

fn rec(cells: Vec<(&str, Cell)>) -> Record {
    cells.into_iter().map(|(k, c)| (k.to_string(), c)).collect()
}

fn obj(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => Map::new(),
    }
}

pub struct PotentialOutput {
    pub emission: Emission,
    pub min_force: f64,
}

pub fn potential(hp: &HorizonUnitsParams, grid: &[f64]) -> Result<PotentialOutput, Failure> {
    let profile = potential_profile(hp, grid)?;
    let min_force = profile
        .points
        .iter()
        .map(|p| p.force)
        .fold(f64::INFINITY, f64::min);
    let rows = profile
        .points
        .iter()
        .map(|p| {
            rec(vec![
                ("r", Cell::F(p.r)),
                ("r_star", Cell::F(p.r_star)),
                ("U", Cell::F(p.u)),
                ("F", Cell::F(p.force)),
            ])
        })
        .collect();
    Ok(PotentialOutput {
        emission: Emission {
            rows,
            report: obj(json!({
                "barrierless": profile.barrierless(),
                "min_force": min_force,
            })),
            ..Default::default()
        },
        min_force,
    })
}

fn kind_name(k: KindArg) -> &'static str {
    match k {
        KindArg::F => "f",
        KindArg::G => "g",
        KindArg::Out => "out",
        KindArg::In => "in",
    }
}

pub fn wave(
    hp: &HorizonUnitsParams,
    grid: &[f64],
    kinds: &[KindArg],
    residual: bool,
) -> Result<Emission, Failure> {
    let mut columns: Vec<(String, Vec<Cell>)> = Vec::new();
    for &k in kinds {
        let wk = match k {
            KindArg::F => WaveKind::StandingRegular,
            KindArg::G => WaveKind::StandingSingular,
            KindArg::Out => WaveKind::RunningOut,
            KindArg::In => WaveKind::RunningIn,
        };
        let prof = wave_profile(hp, wk, grid)?;
        columns.push((
            kind_name(k).to_string(),
            prof.value.into_iter().map(Cell::C).collect(),
        ));
    }
    let mut worst = Map::new();
    if residual {
        let mut families: Vec<Family> = Vec::new();
        for k in kinds {
            let fam = match k {
                KindArg::F => Family::Regular,
                KindArg::G => Family::Singular,
                _ => continue,
            };
            if !families.contains(&fam) {
                families.push(fam);
            }
        }
        if families.is_empty() {
            families.push(Family::Regular);
        }
        for fam in families {
            let ans = make_ansatz(hp, fam)?;
            let cc = connect(&ans)?;
            let res = grid
                .iter()
                .map(|&r| connection_residual(&ans, &cc, r))
                .collect::<Result<Vec<f64>, DswError>>()?;
            let name = match fam {
                Family::Regular => "residual_f",
                Family::Singular => "residual_g",
            };
            worst.insert(
                format!("max_{name}"),
                json!(res.iter().cloned().fold(0.0, f64::max)),
            );
            columns.push((name.to_string(), res.into_iter().map(Cell::F).collect()));
        }
    }
    let rows = grid
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let mut row = vec![("r".to_string(), Cell::F(r))];
            row.extend(columns.iter().map(|(n, v)| (n.clone(), v[i].clone())));
            row
        })
        .collect();
    Ok(Emission {
        rows,
        report: worst,
        ..Default::default()
    })
}

fn regime_error(hp: &HorizonUnitsParams) -> DswError {
    let j = hp.j as f64;
    DswError::Regime {
        lhs: hp.k_squared(),
        rhs: DEFAULT_MARGIN * j * j,
    }
}

fn reflect_row(hp: &HorizonUnitsParams, tol: &OdeTolerance) -> Result<Record, DswError> {
    let rep = reflection_report(hp)?;
    let flux = horizon_flux_balance_with(hp, tol)?;
    let a = rep.amplitudes;
    Ok(rec(vec![
        ("epsilon", Cell::F(hp.epsilon)),
        ("m", Cell::F(hp.m)),
        ("mu", Cell::F(hp.mu())),
        ("j", Cell::I(hp.j as i64)),
        ("c1", Cell::C(a.c1)),
        ("c2", Cell::C(a.c2)),
        ("a_plus", Cell::C(a.a_plus)),
        ("a_minus", Cell::C(a.a_minus)),
        ("ratio", Cell::F(rep.ratio)),
        ("coefficient", Cell::F(rep.coefficient)),
        ("regime_ok", Cell::B(rep.regime_ok)),
        ("flux_balance", Cell::F(flux)),
        ("truncation_bessel", Cell::F(rep.truncation.bessel)),
        (
            "truncation_gamma_ratio",
            Cell::F(rep.truncation.gamma_ratio),
        ),
    ]))
}

/// Reflection rows for every parameter set, computed on worker threads and
/// returned in input order. Any set outside the εR ≫ j regime fails the run.
pub fn reflect(points: &[HorizonUnitsParams], tol: &OdeTolerance) -> Result<Emission, Failure> {
    for hp in points {
        if hp.epsilon.abs() <= hp.m {
            return Err(DswError::EvanescentMode { mu: hp.mu() }.into());
        }
        if !check_regime(hp, DEFAULT_MARGIN) {
            return Err(regime_error(hp).into());
        }
    }
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let chunk = points.len().div_ceil(workers).max(1);
    let rows: Vec<Result<Record, DswError>> = std::thread::scope(|s| {
        let handles: Vec<_> = points
            .chunks(chunk)
            .map(|part| {
                s.spawn(move || {
                    part.iter()
                        .map(|hp| reflect_row(hp, tol))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("reflection worker panicked"))
            .collect()
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(Emission {
        rows,
        ..Default::default()
    })
}

pub fn flat_limit(
    sweep: FlatSweep,
    j: u32,
    radii: &[f64],
    kr: &[f64],
) -> Result<Emission, Failure> {
    let table = flat_limit_convergence(sweep, j, radii, kr)?;
    let monotone = table.windows(2).all(|w| w[1].deviation < w[0].deviation);
    // a deviation that stays O(1) across the sweep has not converged even if
    // it drifts down
    let converging = match (table.first(), table.last()) {
        (Some(a), Some(b)) => b.deviation <= 0.5 * a.deviation || b.deviation <= 0.1,
        _ => false,
    };
    let rows = table
        .iter()
        .map(|row| {
            rec(vec![
                ("R_over_lambda", Cell::F(row.radius_over_lambda)),
                ("deviation", Cell::F(row.deviation)),
            ])
        })
        .collect();
    Ok(Emission {
        rows,
        report: obj(json!({
            "monotone_decreasing": monotone,
            "converging": converging,
        })),
        ..Default::default()
    })
}

/// X values of the residual scaling fit.
pub const SCALING_XS: [f64; 3] = [1e-2, 1e-3, 1e-4];

pub fn expand(ep: &ExpansionParams, grid: &[f64]) -> Result<Emission, Failure> {
    let d = decompose_hypergeometric(ep, grid)?;
    let mut identity = 0.0f64;
    let mut imag = 0.0f64;
    let mut approximant_points = 0usize;
    for fam in [Family::Regular, Family::Singular] {
        let (mut diff, mut scale) = (0.0f64, 0.0f64);
        for &r in grid {
            let closed = order1(ep, fam, r)?;
            diff = diff.max((order1_series(ep, fam, r) - closed).norm());
            scale = scale.max(closed.norm());
            match assembled_approximant(ep, fam, r) {
                Ok(v) => {
                    approximant_points += 1;
                    imag = imag.max(v.im.abs() / v.norm());
                }
                // outside the small-argument range of the exponential factor
                Err(DswError::Validity(_)) => {}
                Err(e) => return Err(e.into()),
            }
        }
        if scale > 0.0 {
            identity = identity.max(diff / scale);
        }
    }
    let slope = residual_scaling_slope(ep.mu, ep.j, &SCALING_XS, grid)?;
    let audit = first_order_correction_audit(ep)?;
    let rows = (0..grid.len())
        .map(|i| {
            rec(vec![
                ("r", Cell::F(d.r[i])),
                ("f0", Cell::F(d.f0[i])),
                ("f1", Cell::C(d.f1[i])),
                ("f2_residual", Cell::C(d.f2_residual[i])),
                ("g0", Cell::F(d.g0[i])),
                ("g1", Cell::C(d.g1[i])),
                ("g2_residual", Cell::C(d.g2_residual[i])),
            ])
        })
        .collect();
    let report = json!({
        "f1_identity_error": identity,
        "residual_slope": slope,
        "residual_slope_xs": SCALING_XS,
        "approximant_max_imag": if approximant_points > 0 { json!(imag) } else { Value::Null },
        "approximant_points": approximant_points,
        "audit": audit,
    });
    Ok(Emission {
        rows,
        report: obj(report),
        ..Default::default()
    })
}

pub fn classify(fixture: &str) -> Result<Emission, Failure> {
    let coeffs = parse_fixture(fixture)?;
    let report = classify_singularities(&coeffs)?;
    let rows = report
        .points
        .iter()
        .map(|p| {
            let (e1, e2) = match &p.exponents {
                Some([a, b]) => (a.to_string(), b.to_string()),
                None => (String::new(), String::new()),
            };
            let kind = serde_json::to_value(p.kind)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default();
            rec(vec![
                ("location", Cell::S(p.location.to_string())),
                ("kind", Cell::S(kind)),
                ("exponent_1", Cell::S(e1)),
                ("exponent_2", Cell::S(e2)),
            ])
        })
        .collect();
    let class = serde_json::to_value(report.classification).unwrap_or(Value::Null);
    Ok(Emission {
        rows,
        report: obj(json!({
            "classification": class,
            "singular_points": report.classification.count(),
            "report": report,
        })),
        ..Default::default()
    })
}
