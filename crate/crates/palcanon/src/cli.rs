//! Command-line interface.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 numerical failure.

use crate::blocks::{
    gamma_block, generic_spec, h_block, jordan_zero_block, parse_complex, CanonicalFormSpec,
};
use crate::classify::{classify_generic_full, BundleClass, ClassifyOptions, Parity};
use crate::error::Error;
use crate::experiment::{
    emit_frequency_csv, emit_scatter_csv, run_experiment, ExperimentConfig, Generator,
};
use crate::io::{matrix_to_text, read_matrix, write_matrix};
use crate::matrix::{Complex, StarKind};
use crate::perturb::{
    gamma_even_eps_schedule, gamma_even_predicted, gamma_odd_eps_schedule, gamma_odd_predicted,
    gamma_perturbation_even, gamma_perturbation_odd, h_eps_schedule, h_perturbation, h_predicted,
    verify_prediction, MatchedConvention, PerturbationReport,
};
use crate::rng::{random_congruence, random_uniform_complex, RngStream};
use crate::spectrum::{
    pencil_eigenvalues, reciprocal_pairing, ModulusLabel, UnitRule, DEFAULT_UNIT_TOL,
};
use std::collections::BTreeMap;

const USAGE: &str = "\
palcanon — canonical forms under congruence, palindromic pencil spectra,
generic bundle classification, and Monte Carlo experiments.

USAGE:
  palcanon <SUBCOMMAND> [FLAGS]

SUBCOMMANDS:
  classify --star {t|h} --input FILE [--unit-tol X] [--distinct-tol Y]
           [--scale-free] [--out-eigs FILE]
      Classify a matrix into its generic bundle. Prints one report line:
      class=G*|Gc|NG ell=<int|-> n=<int> unit_count=<int|-> reason=<tag|->

  block j0 --k K
  block gamma --k K [--alpha A+Bi]
  block h --k K --mu A+Bi
  block spec --star {t|h} SPECSTR
      Print a canonical block (or a whole form given as, e.g.,
      \"J0(2);G(3)*1+0i;H(1)*3+0i\") as a matrix file on stdout.

  synth --star {t|h} --n N [--ell L] [--seed Z] [--cond C] [--out FILE]
      Draw a generic canonical form, conjugate it by a random congruence,
      and print the matrix (stdout or FILE) plus its ground-truth class.

  perturb {gamma-even|gamma-odd|h} --k K --delta D --star {t|h}
          [--alpha A+Bi] [--mu A+Bi] [--out-csv FILE]
      Build the named perturbation, compare the computed pencil spectrum
      against its closed-form prediction, and print the report.

  experiment --star {t|h} --n N --trials M --gen {uniform|shifted}
             [--seed Z] [--threads T] [--unit-tol X] [--scale-free]
             --out-freq FILE [--out-scatter FILE]
      Count unit eigenvalues over M random pencils and write the
      frequency histogram (and per-trial scatter) as CSV.

  selftest
      Run quick invariant checks at small sizes.

The environment variable PALCANON_SEED supplies the seed when --seed is
absent.
";

struct Args {
    positionals: Vec<String>,
    flags: BTreeMap<String, String>,
}

const BOOL_FLAGS: &[&str] = &["--scale-free"];

fn parse_args(tokens: &[String]) -> Result<Args, String> {
    let mut positionals = Vec::new();
    let mut flags = BTreeMap::new();
    let mut it = tokens.iter().peekable();
    while let Some(tok) = it.next() {
        if let Some(name) = tok.strip_prefix("--") {
            if BOOL_FLAGS.contains(&tok.as_str()) {
                flags.insert(name.to_string(), "true".to_string());
            } else {
                let value = it
                    .next()
                    .ok_or_else(|| format!("flag --{name} needs a value"))?;
                flags.insert(name.to_string(), value.clone());
            }
        } else {
            positionals.push(tok.clone());
        }
    }
    Ok(Args { positionals, flags })
}

impl Args {
    fn take(&mut self, name: &str) -> Option<String> {
        self.flags.remove(name)
    }

    fn require(&mut self, name: &str) -> Result<String, String> {
        self.take(name).ok_or_else(|| format!("missing --{name}"))
    }

    /// Reject leftover flags and unexpected positionals.
    fn finish(&self, allowed_positionals: usize) -> Result<(), String> {
        if self.positionals.len() > allowed_positionals {
            return Err(format!(
                "unexpected argument {:?}",
                self.positionals[allowed_positionals]
            ));
        }
        if let Some(name) = self.flags.keys().next() {
            return Err(format!("unknown flag --{name}"));
        }
        Ok(())
    }
}

fn parse_star(s: &str) -> Result<StarKind, String> {
    match s {
        "t" | "T" => Ok(StarKind::Transpose),
        "h" | "H" | "*" => Ok(StarKind::ConjugateTranspose),
        other => Err(format!("star must be t (transpose) or h (conjugate transpose), got {other:?}")),
    }
}

fn parse_f64(s: &str, what: &str) -> Result<f64, String> {
    s.parse::<f64>()
        .map_err(|_| format!("{what} must be a number, got {s:?}"))
}

fn parse_usize(s: &str, what: &str) -> Result<usize, String> {
    s.parse::<usize>()
        .map_err(|_| format!("{what} must be a non-negative integer, got {s:?}"))
}

fn parse_u64(s: &str, what: &str) -> Result<u64, String> {
    s.parse::<u64>()
        .map_err(|_| format!("{what} must be a non-negative integer, got {s:?}"))
}

fn seed_from(flag: Option<String>) -> Result<u64, String> {
    match flag {
        Some(s) => parse_u64(&s, "--seed"),
        None => match std::env::var("PALCANON_SEED") {
            Ok(s) => parse_u64(&s, "PALCANON_SEED"),
            Err(_) => Ok(0),
        },
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::NumericalFailure { .. } | Error::NearSingular { .. } | Error::PairingFailure { .. }
        | Error::PredictionMismatch { .. } => 2,
        _ => 1,
    }
}

/// Entry point; returns the process exit code.
pub fn run<I: Iterator<Item = String>>(args: I) -> i32 {
    let tokens: Vec<String> = args.skip(1).collect();
    if tokens.is_empty() {
        eprint!("{USAGE}");
        return 1;
    }
    if tokens[0] == "--help" || tokens[0] == "-h" || tokens[0] == "help" {
        print!("{USAGE}");
        return 0;
    }
    match dispatch(&tokens) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}\n");
            eprint!("{USAGE}");
            1
        }
        Err(CliError::Run(e)) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

enum CliError {
    Usage(String),
    Run(Error),
}

impl From<String> for CliError {
    fn from(s: String) -> Self {
        CliError::Usage(s)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Run(e)
    }
}

fn dispatch(tokens: &[String]) -> Result<i32, CliError> {
    let mut args = parse_args(&tokens[1..])?;
    match tokens[0].as_str() {
        "classify" => cmd_classify(&mut args),
        "block" => cmd_block(&mut args),
        "synth" => cmd_synth(&mut args),
        "perturb" => cmd_perturb(&mut args),
        "experiment" => cmd_experiment(&mut args),
        "selftest" => cmd_selftest(&mut args),
        other => Err(CliError::Usage(format!("unknown subcommand {other:?}"))),
    }
}

fn cmd_classify(args: &mut Args) -> Result<i32, CliError> {
    let star = parse_star(&args.require("star")?)?;
    let input = args.require("input")?;
    let unit_tol = match args.take("unit-tol") {
        Some(s) => parse_f64(&s, "--unit-tol")?,
        None => DEFAULT_UNIT_TOL,
    };
    let distinct_tol = match args.take("distinct-tol") {
        Some(s) => parse_f64(&s, "--distinct-tol")?,
        None => crate::classify::DEFAULT_DISTINCT_TOL,
    };
    let scale_free = args.take("scale-free").is_some();
    let out_eigs = args.take("out-eigs");
    args.finish(0)?;

    let a = read_matrix(&input)?;
    let opts = ClassifyOptions {
        unit_rule: if scale_free {
            UnitRule::Absolute { tol: unit_tol }
        } else {
            UnitRule::ScaledByNorm { tol: unit_tol }
        },
        distinct_tol,
    };
    let report = classify_generic_full(&a, star, opts)?;
    println!("{}", report.report_line());
    if let Some(path) = out_eigs {
        let mut csv = String::from("re,im,modulus,label\n");
        if let Some(s) = &report.spectrum {
            for j in 0..s.len() {
                let label = match s.labels[j] {
                    ModulusLabel::Inside => "inside",
                    ModulusLabel::Unit => "unit",
                    ModulusLabel::Outside => "outside",
                };
                csv.push_str(&format!(
                    "{:.16e},{:.16e},{:.16e},{}\n",
                    s.values[j].re, s.values[j].im, s.moduli[j], label
                ));
            }
        }
        std::fs::write(&path, csv).map_err(Error::from)?;
    }
    Ok(0)
}

fn cmd_block(args: &mut Args) -> Result<i32, CliError> {
    let family = args
        .positionals
        .first()
        .cloned()
        .ok_or_else(|| CliError::Usage("block needs a family: j0, gamma, h, or spec".into()))?;
    let matrix = match family.as_str() {
        "j0" => {
            let k = parse_usize(&args.require("k")?, "--k")?;
            args.finish(1)?;
            jordan_zero_block(k)?
        }
        "gamma" => {
            let k = parse_usize(&args.require("k")?, "--k")?;
            let alpha = match args.take("alpha") {
                Some(s) => parse_complex(&s)?,
                None => Complex::new(1.0, 0.0),
            };
            args.finish(1)?;
            gamma_block(k)?.scale(alpha)
        }
        "h" => {
            let k = parse_usize(&args.require("k")?, "--k")?;
            let mu = parse_complex(&args.require("mu")?)?;
            args.finish(1)?;
            h_block(k, mu)?
        }
        "spec" => {
            let star = parse_star(&args.require("star")?)?;
            let text = args
                .positionals
                .get(1)
                .cloned()
                .ok_or_else(|| CliError::Usage("block spec needs a spec string".into()))?;
            args.finish(2)?;
            CanonicalFormSpec::parse(star, &text)?.realize()?
        }
        other => return Err(CliError::Usage(format!("unknown block family {other:?}"))),
    };
    print!("{}", matrix_to_text(&matrix));
    Ok(0)
}

fn cmd_synth(args: &mut Args) -> Result<i32, CliError> {
    let star = parse_star(&args.require("star")?)?;
    let n = parse_usize(&args.require("n")?, "--n")?;
    let ell = match args.take("ell") {
        Some(s) => parse_usize(&s, "--ell")?,
        None => n / 2,
    };
    let seed = seed_from(args.take("seed"))?;
    let cond = match args.take("cond") {
        Some(s) => parse_f64(&s, "--cond")?,
        None => 100.0,
    };
    let out = args.take("out");
    args.finish(0)?;

    let mut rng = RngStream::new(seed, 0);
    let spec = generic_spec(n, ell, star, &mut rng)?;
    let g = spec.realize()?;
    let p = random_congruence(n, &mut rng, cond)?;
    let a = g.congruence(&p, star)?;

    let truth = match star {
        StarKind::ConjugateTranspose => format!("class=G* ell={ell} n={n}"),
        StarKind::Transpose => format!("class=Gc ell=- n={n}"),
    };
    match out {
        Some(path) => {
            write_matrix(&a, &path)?;
            println!("{truth} seed={seed} spec={spec}");
        }
        None => {
            print!("{}", matrix_to_text(&a));
            eprintln!("{truth} seed={seed} spec={spec}");
        }
    }
    Ok(0)
}

fn print_perturbation_report(report: &PerturbationReport) {
    // Expand predicted entries by multiplicity and pair each with its
    // nearest computed eigenvalue for display.
    let mut predicted: Vec<Complex> = Vec::new();
    for &(v, m) in &report.predicted.entries {
        for _ in 0..m {
            predicted.push(v);
        }
    }
    let sign = match report.convention {
        MatchedConvention::Direct => 1.0,
        MatchedConvention::Negated => -1.0,
    };
    let mut used = vec![false; report.computed.values.len()];
    println!("{:>28}  {:>28}  {:>12}", "predicted", "computed", "abs error");
    for p in predicted.iter().map(|&v| v * sign) {
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for (c, &z) in report.computed.values.iter().enumerate() {
            if used[c] {
                continue;
            }
            let d = (z - p).norm();
            if d < best_d {
                best_d = d;
                best = c;
            }
        }
        used[best] = true;
        let z = report.computed.values[best];
        println!(
            "{:>14.6e} {:>+13.6e}i  {:>14.6e} {:>+13.6e}i  {:>12.3e}",
            p.re, p.im, z.re, z.im, best_d
        );
    }
    println!(
        "max_rel_error={:.3e} convention={} class={}",
        report.max_rel_error,
        match report.convention {
            MatchedConvention::Direct => "direct",
            MatchedConvention::Negated => "negated",
        },
        match report.classified {
            BundleClass::GenericStar { ell } => format!("G* ell={ell}"),
            BundleClass::GenericCongruence { parity } => format!(
                "Gc parity={}",
                if parity == Parity::Even { "even" } else { "odd" }
            ),
            BundleClass::NonGeneric { reason } => format!("NG reason={}", reason.tag()),
        }
    );
}

fn cmd_perturb(args: &mut Args) -> Result<i32, CliError> {
    let family = args
        .positionals
        .first()
        .cloned()
        .ok_or_else(|| CliError::Usage("perturb needs a family: gamma-even, gamma-odd, or h".into()))?;
    let star = parse_star(&args.require("star")?)?;
    let k = parse_usize(&args.require("k")?, "--k")?;
    let delta = parse_f64(&args.require("delta")?, "--delta")?;
    let alpha = match args.take("alpha") {
        Some(s) => parse_complex(&s)?,
        None => Complex::new(1.0, 0.0),
    };
    let mu = match args.take("mu") {
        Some(s) => Some(parse_complex(&s)?),
        None => None,
    };
    let out_csv = args.take("out-csv");
    args.finish(1)?;

    let (perturbed, predicted) = match family.as_str() {
        "gamma-even" => {
            let eps = gamma_even_eps_schedule(k, delta)?;
            (
                gamma_perturbation_even(k, alpha, &eps, star)?,
                gamma_even_predicted(k, alpha, &eps, star)?,
            )
        }
        "gamma-odd" => {
            let eps = gamma_odd_eps_schedule(k, delta)?;
            (
                gamma_perturbation_odd(k, alpha, &eps, star)?,
                gamma_odd_predicted(k, alpha, &eps, star)?,
            )
        }
        "h" => {
            let mu = mu.ok_or_else(|| CliError::Usage("perturb h needs --mu".into()))?;
            let eps = h_eps_schedule(k, delta)?;
            (
                h_perturbation(k, mu, &eps, star)?,
                h_predicted(k, mu, &eps, star)?,
            )
        }
        other => return Err(CliError::Usage(format!("unknown perturbation family {other:?}"))),
    };

    let report = verify_prediction(&perturbed, &predicted, star, 1e-8)?;
    print_perturbation_report(&report);

    if let Some(path) = out_csv {
        let sign = match report.convention {
            MatchedConvention::Direct => 1.0,
            MatchedConvention::Negated => -1.0,
        };
        let mut rows = String::from("predicted_re,predicted_im,computed_re,computed_im,abs_error\n");
        let mut used = vec![false; report.computed.values.len()];
        for &(v, m) in &report.predicted.entries {
            for _ in 0..m {
                let p = v * sign;
                let mut best = usize::MAX;
                let mut best_d = f64::INFINITY;
                for (c, &z) in report.computed.values.iter().enumerate() {
                    if !used[c] && (z - p).norm() < best_d {
                        best_d = (z - p).norm();
                        best = c;
                    }
                }
                used[best] = true;
                let z = report.computed.values[best];
                rows.push_str(&format!(
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.3e}\n",
                    p.re, p.im, z.re, z.im, best_d
                ));
            }
        }
        std::fs::write(&path, rows).map_err(Error::from)?;
    }
    Ok(0)
}

fn cmd_experiment(args: &mut Args) -> Result<i32, CliError> {
    let star = parse_star(&args.require("star")?)?;
    let n = parse_usize(&args.require("n")?, "--n")?;
    let trials = parse_u64(&args.require("trials")?, "--trials")?;
    let generator = match args.require("gen")?.as_str() {
        "uniform" => Generator::Uniform,
        "shifted" => Generator::ShiftedInteger,
        other => {
            return Err(CliError::Usage(format!(
                "generator must be uniform or shifted, got {other:?}"
            )))
        }
    };
    let seed = seed_from(args.take("seed"))?;
    let threads = match args.take("threads") {
        Some(s) => parse_usize(&s, "--threads")?,
        None => std::thread::available_parallelism().map_or(1, |v| v.get()),
    };
    let unit_tol = match args.take("unit-tol") {
        Some(s) => parse_f64(&s, "--unit-tol")?,
        None => DEFAULT_UNIT_TOL,
    };
    let scale_free = args.take("scale-free").is_some();
    let out_freq = args.require("out-freq")?;
    let out_scatter = args.take("out-scatter");
    args.finish(0)?;

    let mut cfg = ExperimentConfig::new(n, trials, star, generator);
    cfg.master_seed = seed;
    cfg.threads = threads;
    cfg.unit_tol = unit_tol;
    cfg.scale_free = scale_free;

    let (table, records) = run_experiment(&cfg)?;
    emit_frequency_csv(&table, &out_freq)?;
    if let Some(path) = out_scatter {
        emit_scatter_csv(&records, &path)?;
    }
    println!(
        "trials={} counted={} skipped={}",
        table.total,
        table.counted(),
        table.skipped
    );
    if star == StarKind::ConjugateTranspose {
        let violations = table.parity_violations(n);
        if violations.is_empty() {
            println!("parity=ok");
        } else {
            println!("parity=VIOLATED bins={violations:?}");
        }
    }
    Ok(0)
}

fn cmd_selftest(args: &mut Args) -> Result<i32, CliError> {
    if !args.positionals.is_empty() || !args.flags.is_empty() {
        return Err(CliError::Usage("selftest takes no arguments".into()));
    }
    let mut failures = 0;
    let mut check = |name: &str, ok: bool| {
        println!("{}: {}", name, if ok { "PASS" } else { "FAIL" });
        if !ok {
            failures += 1;
        }
    };

    // Γ_k cosquare: all transpose-pencil eigenvalues of Γ_k equal (-1)^k.
    let mut ok = true;
    for k in 1..=6 {
        let g = gamma_block(k).unwrap();
        let s = pencil_eigenvalues(&g, StarKind::Transpose).unwrap();
        let target = Complex::new(if k % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
        ok &= s.values.iter().all(|v| (v - target).norm() < 1e-4);
    }
    check("gamma cosquare eigenvalues", ok);

    // Round-trip classification on small generic forms.
    let mut ok = true;
    let mut rng = RngStream::new(1234, 0);
    for &(n, ell) in &[(4usize, 1usize), (7, 3), (6, 0)] {
        let spec = generic_spec(n, ell, StarKind::ConjugateTranspose, &mut rng).unwrap();
        let a = spec.realize().unwrap();
        let p = random_congruence(n, &mut rng, 100.0).unwrap();
        let b = a.congruence(&p, StarKind::ConjugateTranspose).unwrap();
        let r = classify_generic_full(&b, StarKind::ConjugateTranspose, Default::default())
            .unwrap();
        ok &= r.class == BundleClass::GenericStar { ell };
    }
    check("classification round trip", ok);

    // Palindromic pairing on random matrices.
    let mut ok = true;
    for stream in 1..=4 {
        let mut rng = RngStream::new(99, stream);
        let a = random_uniform_complex(8, &mut rng);
        for star in [StarKind::Transpose, StarKind::ConjugateTranspose] {
            let s = pencil_eigenvalues(&a, star).unwrap();
            let rep = reciprocal_pairing(&s, star, 1e-8).unwrap();
            ok &= rep.within_tol;
        }
    }
    check("reciprocal pairing", ok);

    // Matrix file format round trip.
    let mut rng = RngStream::new(7, 7);
    let a = random_uniform_complex(5, &mut rng);
    let round = crate::io::matrix_from_text(&matrix_to_text(&a)).unwrap();
    check("matrix text round trip", round == a);

    // Experiment determinism across thread counts.
    let mut cfg = ExperimentConfig::new(5, 10, StarKind::ConjugateTranspose, Generator::Uniform);
    cfg.master_seed = 3;
    let (t1, _) = run_experiment(&cfg).unwrap();
    cfg.threads = 2;
    let (t2, _) = run_experiment(&cfg).unwrap();
    check("experiment thread determinism", t1 == t2);

    if failures == 0 {
        println!("selftest: all checks passed");
        Ok(0)
    } else {
        println!("selftest: {failures} check(s) failed");
        Ok(2)
    }
}
