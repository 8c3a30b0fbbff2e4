//! Implementations of the kernel, pick, model, and dilate subcommands.

use serde_json::json;
use uikernels::kernel::{
    self, classify_summability, compute_a, invert_series, is_cnp, CnpVerdict, CoeffTable,
    KernelFamily,
};
use uikernels::model::{self, HereditaryOrder};
use uikernels::pick::{
    self, feasibility_threshold, is_psd, kernel_quotient_gram, pick_matrix, worst_two_by_two_minor,
};
use uikernels::poly::{self, build_basis, MultiIndex};
use uikernels::sampling::ball_grid;
use uikernels::{dilation, CMatrix, C64};

use crate::{
    family_from_common, parse_family, write_output, CliError, DilateArgs, KernelArgs, ModelArgs,
    PickArgs, EXIT_PASS, EXIT_VERDICT,
};

pub(crate) fn ready_table(family: KernelFamily, n: usize) -> Result<CoeffTable, CliError> {
    let spec = kernel::KernelSpec::new(family, 1).map_err(|e| CliError::Usage(e.to_string()))?;
    let table = compute_a(&spec, n).map_err(|e| CliError::Usage(e.to_string()))?;
    invert_series(&table).map_err(|e| CliError::Math(e.to_string()))
}

fn family_tag(family: &KernelFamily) -> String {
    match family {
        KernelFamily::Hardy => "hardy".into(),
        KernelFamily::DruryArveson => "drury_arveson".into(),
        KernelFamily::HS { s } => format!("h_s(s={})", s),
        KernelFamily::BesovSobolev { sigma } => format!("besov_sobolev(sigma={})", sigma),
        KernelFamily::BergmanDisc => "bergman_disc".into(),
        KernelFamily::Custom { .. } => "custom".into(),
    }
}

pub fn run_kernel(args: KernelArgs) -> Result<i32, CliError> {
    let common = args.common.merged()?;
    let tol = common.tol_or(1e-12);
    let (family, d, n) = if let Some(path) = &args.spec {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let file = kernel::spec_from_json(&text)
            .map_err(|e| CliError::Usage(format!("spec {}: {}", path.display(), e)))?;
        let n = common.n.or(file.n).ok_or_else(|| {
            CliError::Usage(
                "truncation order missing: pass -N or put \"N\" in the spec file".into(),
            )
        })?;
        (file.spec.family, file.spec.d, n)
    } else {
        let family = family_from_common(&common)?;
        let n = common
            .n
            .ok_or_else(|| CliError::Usage("missing -N truncation order".into()))?;
        (family, common.d(), n)
    };
    let spec =
        kernel::KernelSpec::new(family.clone(), d).map_err(|e| CliError::Usage(e.to_string()))?;
    let table = compute_a(&spec, n).map_err(|e| CliError::Usage(e.to_string()))?;
    let table = invert_series(&table).map_err(|e| CliError::Math(e.to_string()))?;
    let verdict = is_cnp(&table, tol).map_err(|e| CliError::Math(e.to_string()))?;
    let summability =
        classify_summability(&table, tol).map_err(|e| CliError::Math(e.to_string()))?;
    let regularity = if n >= 4 {
        Some(kernel::regularity_profile(&table).map_err(|e| CliError::Math(e.to_string()))?)
    } else {
        None
    };

    let payload = if common.format.as_deref() == Some("csv") {
        table.to_csv()
    } else {
        let report = json!({
            "operation": "kernel",
            "family": family_tag(&family),
            "d": d,
            "N": n,
            "tolerance": tol,
            "cnp": verdict,
            "cnp_margin": table.cnp_margin(),
            "sum_a": summability.sum_a,
            "sum_b": summability.sum_b,
            "b_sum_within_bound": summability.b_sum_within_bound,
            "regularity_max_tail_deviation": regularity.as_ref().map(|r| r.max_tail_deviation),
            "a_head": table.a_slice().iter().take(8).copied().collect::<Vec<_>>(),
            "b_head": table.b_slice().map(|b| b.iter().take(8).copied().collect::<Vec<_>>()),
        });
        serde_json::to_string_pretty(&report).expect("report serialization")
    };
    write_output(&common.out, &payload)?;
    println!("{}", payload);
    Ok(match verdict {
        CnpVerdict::Pass => EXIT_PASS,
        CnpVerdict::Fail { .. } => EXIT_VERDICT,
    })
}

pub fn run_pick(args: PickArgs) -> Result<i32, CliError> {
    let common = args.common.merged()?;
    let tol = common.tol_or(1e-10);
    let n_eval = common.n_or(400);

    // Kernel-quotient mode.
    if args.quotient_num.is_some() || args.quotient_den.is_some() {
        let num_name = args
            .quotient_num
            .as_ref()
            .ok_or_else(|| CliError::Usage("quotient mode needs --quotient-num".into()))?;
        let den_name = args
            .quotient_den
            .as_ref()
            .ok_or_else(|| CliError::Usage("quotient mode needs --quotient-den".into()))?;
        let num =
            kernel::KernelSpec::new(parse_family(num_name, common.s, common.sigma)?, common.d())
                .map_err(|e| CliError::Usage(e.to_string()))?;
        let den =
            kernel::KernelSpec::new(parse_family(den_name, common.s, common.sigma)?, common.d())
                .map_err(|e| CliError::Usage(e.to_string()))?;
        let points = ball_grid(common.d(), args.points, args.radius, common.seed_or(0));
        let (gram, verdict) = kernel_quotient_gram(&num, &den, &points, n_eval, tol)
            .map_err(|e| CliError::Math(e.to_string()))?;
        let minor = if verdict.psd {
            None
        } else {
            worst_two_by_two_minor(&gram)
        };
        let payload = if common.format.as_deref() == Some("csv") {
            let mut csv = String::from(
                "operation,numerator,denominator,points,min_eigenvalue,scale,tolerance,verdict\n",
            );
            csv.push_str(&format!(
                "quotient,{},{},{},{},{},{},{}\n",
                num_name,
                den_name,
                args.points,
                uikernels::fmt_f64(verdict.min_eigenvalue),
                uikernels::fmt_f64(verdict.scale),
                uikernels::fmt_f64(tol),
                if verdict.psd { "psd" } else { "not_psd" }
            ));
            csv
        } else {
            serde_json::to_string_pretty(&json!({
                "operation": "kernel_quotient",
                "numerator": num_name,
                "denominator": den_name,
                "points": args.points,
                "seed": common.seed_or(0),
                "verdict": verdict,
                "negative_minor": minor,
            }))
            .expect("report serialization")
        };
        write_output(&common.out, &payload)?;
        println!("{}", payload);
        return Ok(if verdict.psd { EXIT_PASS } else { EXIT_VERDICT });
    }

    // Problem-file modes.
    let path = args.problem.as_ref().ok_or_else(|| {
        CliError::Usage("pick needs --problem or --quotient-num/--quotient-den".into())
    })?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let problem = pick::problem_from_json(&text)
        .map_err(|e| CliError::Usage(format!("problem {}: {}", path.display(), e)))?;
    let family = family_from_common(&common)?;
    let spec = kernel::KernelSpec::new(family.clone(), problem.d)
        .map_err(|e| CliError::Usage(e.to_string()))?;

    if args.sweep {
        let threshold = feasibility_threshold(&problem, &spec, n_eval, 1.0, 1e-8, tol)
            .map_err(|e| CliError::Math(e.to_string()))?;
        let payload = if common.format.as_deref() == Some("csv") {
            format!(
                "operation,family,nodes,threshold,bisection_tolerance,tolerance\npick_sweep,{},{},{},{},{}\n",
                family_tag(&family),
                problem.nodes.len(),
                uikernels::fmt_f64(threshold),
                uikernels::fmt_f64(1e-8),
                uikernels::fmt_f64(tol)
            )
        } else {
            serde_json::to_string_pretty(&json!({
                "operation": "pick_sweep",
                "family": family_tag(&family),
                "nodes": problem.nodes.len(),
                "threshold": threshold,
                "bisection_tolerance": 1e-8,
                "tolerance": tol,
            }))
            .expect("report serialization")
        };
        write_output(&common.out, &payload)?;
        println!("{}", payload);
        return Ok(EXIT_PASS);
    }

    let matrix = pick_matrix(&problem, &spec, n_eval).map_err(|e| CliError::Math(e.to_string()))?;
    let verdict = is_psd(&matrix, tol).map_err(|e| CliError::Math(e.to_string()))?;
    let payload = if common.format.as_deref() == Some("csv") {
        format!(
            "operation,family,nodes,min_eigenvalue,scale,tolerance,verdict\npick_feasibility,{},{},{},{},{},{}\n",
            family_tag(&family),
            problem.nodes.len(),
            uikernels::fmt_f64(verdict.min_eigenvalue),
            uikernels::fmt_f64(verdict.scale),
            uikernels::fmt_f64(tol),
            if verdict.psd { "psd" } else { "not_psd" }
        )
    } else {
        serde_json::to_string_pretty(&json!({
            "operation": "pick_feasibility",
            "family": family_tag(&family),
            "nodes": problem.nodes.len(),
            "target_dim": problem.target_dim,
            "verdict": verdict,
        }))
        .expect("report serialization")
    };
    write_output(&common.out, &payload)?;
    println!("{}", payload);
    Ok(if verdict.psd { EXIT_PASS } else { EXIT_VERDICT })
}

pub fn run_model(args: ModelArgs) -> Result<i32, CliError> {
    let common = args.common.merged()?;
    let family = family_from_common(&common)?;
    let d = common.d();
    let n = common
        .n
        .ok_or_else(|| CliError::Usage("missing -N truncation order".into()))?;
    let table = ready_table(family.clone(), n)?;
    let basis = build_basis(&table, d, n).map_err(|e| CliError::Usage(e.to_string()))?;
    let shift = model::shift_tuple(&basis);

    if args.bergman_hereditary {
        let bergman = ready_table(KernelFamily::BergmanDisc, n)?;
        let h = model::hereditary_1k(&shift, &bergman, HereditaryOrder::AutoNilpotent)
            .map_err(|e| CliError::Math(e.to_string()))?;
        let payload = serde_json::to_string_pretty(&json!({
            "operation": "bergman_hereditary",
            "shift_family": family_tag(&family),
            "d": d,
            "N": n,
            "min_eigenvalue": h.min_eigenvalue,
            "eigenvalues": h.eigenvalues,
            "tolerance": common.tol_or(1e-10),
            "verdict": if h.is_psd(common.tol_or(1e-10)) { "psd" } else { "not_psd" },
        }))
        .expect("report serialization");
        write_output(&common.out, &payload)?;
        println!("{}", payload);
        return Ok(if h.is_psd(common.tol_or(1e-10)) {
            EXIT_PASS
        } else {
            EXIT_VERDICT
        });
    }

    let check = args.check.as_deref().unwrap_or("projection");
    let tol = common.tol_or(1e-10);
    let (payload, pass) = match check {
        "projection" => {
            let h = model::hereditary_1k(&shift, &table, HereditaryOrder::AutoNilpotent)
                .map_err(|e| CliError::Math(e.to_string()))?;
            let mut projection = CMatrix::zeros(basis.len(), basis.len());
            projection[(0, 0)] = C64::new(1.0, 0.0);
            let distance = uikernels::linalg::spectral_norm(&(&h.matrix - projection));
            (
                json!({
                    "operation": "model_projection",
                    "family": family_tag(&family),
                    "d": d, "N": n,
                    "distance_to_rank_one_projection": distance,
                    "min_eigenvalue": h.min_eigenvalue,
                    "tolerance": tol,
                    "verdict": if distance <= tol { "pass" } else { "fail" },
                }),
                distance <= tol,
            )
        }
        "lemma91" => {
            let dim = basis.len();
            let mut q = CMatrix::zeros(dim, dim - 1);
            for i in 1..dim {
                q[(i, i - 1)] = C64::new(1.0, 0.0);
            }
            let restricted =
                model::compress(&shift, &q).map_err(|e| CliError::Math(e.to_string()))?;
            let h = model::hereditary_1k(&restricted, &table, HereditaryOrder::AutoNilpotent)
                .map_err(|e| CliError::Math(e.to_string()))?;
            let mut expected: Vec<f64> = Vec::new();
            for m in 1..=n {
                let lambda = table.b(m).unwrap() / table.a(m);
                expected.extend(std::iter::repeat_n(lambda, basis.dim_of_degree(m)));
            }
            expected.sort_by(f64::total_cmp);
            let mut got = h.eigenvalues.clone();
            got.sort_by(f64::total_cmp);
            let distance = got
                .iter()
                .zip(&expected)
                .map(|(g, e)| (g - e).abs())
                .fold(0.0f64, f64::max);
            (
                json!({
                    "operation": "model_lemma91",
                    "family": family_tag(&family),
                    "d": d, "N": n,
                    "expected_eigenvalues": expected,
                    "computed_eigenvalues": got,
                    "max_multiset_distance": distance,
                    "tolerance": tol,
                    "verdict": if distance <= tol { "pass" } else { "fail" },
                }),
                distance <= tol,
            )
        }
        "defect" => {
            let defect = model::defect_operator(&shift).map_err(|e| CliError::Math(e.to_string()))?;
            (
                json!({
                    "operation": "model_defect",
                    "family": family_tag(&family),
                    "d": d, "N": n,
                    "eigenvalues": defect.eigenvalues,
                }),
                true,
            )
        }
        "commutators" => {
            let tails = model::commutator_tail_norms(&shift, &basis.degree_dims())
                .map_err(|e| CliError::Math(e.to_string()))?;
            (
                json!({
                    "operation": "model_commutator_tails",
                    "family": family_tag(&family),
                    "d": d, "N": n,
                    "full": tails.full,
                    "interior": tails.interior,
                }),
                true,
            )
        }
        "toeplitz" => {
            let da = ready_table(KernelFamily::DruryArveson, n)?;
            let td = model::toeplitz_defect(&table, &da, d, n)
                .map_err(|e| CliError::Math(e.to_string()))?;
            (
                json!({
                    "operation": "model_toeplitz_defect",
                    "family": family_tag(&family),
                    "reference": "drury_arveson",
                    "d": d, "N": n,
                    "per_degree_magnitude": td.magnitudes,
                    "model_residual": td.max_residual,
                    "tolerance": 1e-12,
                    "verdict": if td.max_residual <= 1e-12 { "pass" } else { "fail" },
                }),
                td.max_residual <= 1e-12,
            )
        }
        "norms" => {
            let mut rows = Vec::new();
            for power in 1..=n.min(5) {
                let mut exps = vec![0u32; d];
                exps[0] = power as u32;
                let report = model::sampled_multiplier_power_norm(
                    &table,
                    d,
                    n,
                    &MultiIndex::new(exps),
                )
                .map_err(|e| CliError::Math(e.to_string()))?;
                rows.push(json!({
                    "power": power,
                    "truncated_norm_sq": report.norm_sq,
                    "monomial_norm_sq": report.target_norm_sq,
                    "attained": report.attained,
                }));
            }
            (
                json!({
                    "operation": "model_power_norms",
                    "family": family_tag(&family),
                    "d": d, "N": n,
                    "rows": rows,
                }),
                true,
            )
        }
        "technical" => {
            let mut worst = 0.0f64;
            for m in 1..=n.min(6) {
                for nn in 1..=m {
                    let p = uikernels::sampling::random_homogeneous(&basis, m, common.seed_or(0) ^ (m * 37 + nn) as u64);
                    let r = model::technical_identity_check(&basis, nn, m, &p)
                        .map_err(|e| CliError::Math(e.to_string()))?;
                    worst = worst.max(r.residual);
                }
            }
            (
                json!({
                    "operation": "model_technical_identity",
                    "family": family_tag(&family),
                    "d": d, "N": n,
                    "max_relative_residual": worst,
                    "tolerance": tol,
                    "verdict": if worst <= tol { "pass" } else { "fail" },
                }),
                worst <= tol,
            )
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown --check {:?}; expected projection, lemma91, defect, commutators, toeplitz, norms, technical",
                other
            )))
        }
    };
    let payload = serde_json::to_string_pretty(&payload).expect("report serialization");
    write_output(&common.out, &payload)?;
    println!("{}", payload);
    Ok(if pass { EXIT_PASS } else { EXIT_VERDICT })
}

pub fn run_dilate(args: DilateArgs) -> Result<i32, CliError> {
    let common = args.common.merged()?;
    let tol = common.tol_or(1e-8);
    let d = common.d();
    let n = common
        .n
        .ok_or_else(|| CliError::Usage("missing -N truncation order".into()))?;
    let table_family = family_from_common(&common)?;
    kernel::KernelSpec::new(table_family.clone(), d).map_err(|e| CliError::Usage(e.to_string()))?;
    let table = ready_table(table_family.clone(), n)?;
    let basis = build_basis(&table, d, n).map_err(|e| CliError::Usage(e.to_string()))?;

    let ideal = match &args.ideal {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            Some(
                poly::ideal_from_json(&text)
                    .map_err(|e| CliError::Usage(format!("ideal {}: {}", path.display(), e)))?,
            )
        }
        None => None,
    };

    let tuple = if let Some(path) = &args.tuple {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        model::tuple_from_text(&text)
            .map_err(|e| CliError::Usage(format!("tuple {}: {}", path.display(), e)))?
            .scaled(args.scale)
    } else {
        let shift_family = match &args.shift_family {
            Some(name) => parse_family(name, common.s, common.sigma)?,
            None => table_family.clone(),
        };
        let shift_table = ready_table(shift_family, n)?;
        let shift_basis =
            build_basis(&shift_table, d, n).map_err(|e| CliError::Usage(e.to_string()))?;
        let shift = model::shift_tuple(&shift_basis);
        match &ideal {
            Some(ideal) => {
                let complement = poly::complement_basis(ideal, &shift_basis, 1e-10)
                    .map_err(|e| CliError::Math(e.to_string()))?;
                let q = complement.stacked(&shift_basis);
                model::compress(&shift, &q)
                    .map_err(|e| CliError::Math(e.to_string()))?
                    .scaled(args.scale)
            }
            None => shift.scaled(args.scale),
        }
    };

    let mut cert = dilation::agler_coextension(&tuple, &table, &basis, tol)
        .map_err(|e| CliError::Math(e.to_string()))?;
    if let Some(ideal) = &ideal {
        // The generators annihilate the compressed tuple, so the range of V
        // must lie in the H_I coordinate block of the table-family basis.
        let slices =
            poly::ideal_slices(ideal, &basis, 1e-10).map_err(|e| CliError::Math(e.to_string()))?;
        cert = cert.with_ideal_residual(&slices, &basis);
    }
    let payload = cert.to_json();
    write_output(&common.out, &payload)?;
    println!("{}", payload);
    Ok(if cert.valid { EXIT_PASS } else { EXIT_VERDICT })
}
