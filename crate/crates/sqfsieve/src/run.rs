//! Command execution: one function per subcommand, each returning a [`Report`].

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use sqfsieve_core::arithstat::{
    abelian_group_orders, aut_bruteforce, cohen_lenstra_prediction, corollary12_constant, etale_table, f3_euler_limit, f3_squarefree_density,
    infinite_mass, local_mass, mass_enumerate_oracle, mass_from_table, r2, sigmalimit_constant, theorem11_constant,
    unramified_average, zeta, Sign, Variant, MAX_DIGITS,
};
use sqfsieve_core::decimal::Decimal;
use sqfsieve_core::forms::{random_form_with, FormVector, GroupElement};
use sqfsieve_core::invariants::{disc, disc_int, evaluate};
use sqfsieve_core::localdensity::PointClass;
use sqfsieve_core::moves::{
    f3_normalize, f3_reduce, f4_normalize, f4_reduce, g2_no_move_witness, g3_node_move, g3_normalize, phi_embed,
    sample_f3_normal, sample_f4_normal, sample_g2_normal, sample_g3_node, MoveRecord,
};
use sqfsieve_core::{Error, Family};

use crate::cache::Cache;
use crate::config::{Command, ConstantKind, MassSource, MoveKind, RunConfig};
use crate::driver::Runner;
use crate::report::{
    euler_display, euler_json, gamma_json, move_report, rational_f64, rational_string, record_report,
    sieve_report, Report, Table,
};
use crate::RunError;

pub fn execute(cfg: &RunConfig) -> Result<Report, RunError> {
    if cfg.precision == 0 || cfg.precision > MAX_DIGITS {
        return Err(RunError::Usage(format!("--precision must be in 1..={MAX_DIGITS}")));
    }
    let cache = match &cfg.cache_dir {
        Some(dir) => Some(Cache::open(dir)?),
        None => None,
    };
    let runner = Runner::new(cfg.threads, cfg.budget, cache)?;
    let start = Instant::now();
    let mut report = match &cfg.command {
        Command::Disc { form } => cmd_disc(form)?,
        &Command::Cp { family, ref primes, method, samples } => {
            let mut recs = Vec::new();
            for &p in primes {
                recs.push(runner.cp(family, p, method, samples, cfg.seed)?);
            }
            record_report(&recs)
        }
        &Command::Density { family, n, cutoff, trial_bound, samples } => {
            let mut rep = match samples {
                Some(s) => runner.density_montecarlo(family, n, s, cfg.seed, cutoff, trial_bound)?,
                None => runner.density_box(family, n, cutoff, trial_bound)?,
            };
            if cfg.timing {
                rep.wall_clock = Some(start.elapsed().as_secs_f64());
            }
            density_report(&runner, &rep, cfg.precision)?
        }
        Command::Tail { family, r, ms, skew } => cmd_tail(&runner, *family, *r, ms, skew.as_deref())?,
        Command::Variety { family, rs, equations } => {
            let mut rep = Report::new("variety_count");
            rep.both("family", family.id());
            rep.field("equations", equations.iter().map(|e| format!("{e:?}")).collect::<Vec<_>>());
            let mut t = Table::new(&["r", "count"]);
            let mut rows = Vec::new();
            for &r in rs {
                let c = runner.count_on_variety(*family, equations, r)?;
                rows.push(json!({ "r": r, "count": c }));
                t.push(vec![r.to_string(), c.to_string()]);
            }
            rep.field("counts", rows);
            rep.table = Some(t);
            rep
        }
        Command::Histogram { family, n, primes } => {
            let h = runner.strong_weak_histogram(*family, *n, primes)?;
            let mut rep = Report::new("strong_weak_histogram");
            rep.both("family", family.id()).both("N", *n).both("total", h.total);
            let mut t = Table::new(&["p", "strong", "weak", "strong_freq", "weak_freq"]);
            let mut rows = Vec::new();
            for (p, (s, w)) in &h.counts {
                let fs = *s as f64 / h.total.max(1) as f64;
                let fw = *w as f64 / h.total.max(1) as f64;
                rows.push(json!({ "p": p, "strong": s, "weak": w, "strong_freq": fs, "weak_freq": fw }));
                t.push(vec![p.to_string(), s.to_string(), w.to_string(), format!("{fs:.6}"), format!("{fw:.6}")]);
            }
            rep.field("primes", rows);
            rep.table = Some(t);
            rep
        }
        &Command::Move { kind, p, ref form, samples, bound } => match form {
            Some(f) => cmd_move_one(kind, p, f)?,
            None => cmd_move_batch(kind, p, samples, bound, cfg.seed)?,
        },
        Command::Embed { form, samples, bound } => cmd_embed(form.as_ref(), *samples, *bound, cfg.seed)?,
        Command::Mass { n, primes, source } => cmd_mass(*n, primes, *source)?,
        Command::Constants { kind, n } => cmd_constants(kind, *n, cfg.precision)?,
    };
    if cfg.timing {
        report.field("elapsed_seconds", start.elapsed().as_secs_f64());
    }
    Ok(report)
}

pub fn parse_form(family: Option<Family>, text: &str) -> Result<FormVector, RunError> {
    let text = text.trim();
    let full = match (family, text.contains(':')) {
        (_, true) => text.to_string(),
        (Some(f), false) => format!("{f}:{text}"),
        (None, false) => return Err(RunError::Usage("a form needs a family: give FAMILY or write 'F3:c1,...'".into())),
    };
    let v: FormVector = full.parse()?;
    if let Some(f) = family {
        if v.family() != f {
            return Err(Error::ShapeMismatch(format!("form is {} but --family is {f}", v.family())).into());
        }
    }
    Ok(v)
}

fn cmd_disc(form: &FormVector) -> Result<Report, RunError> {
    let d = evaluate(form);
    let mut rep = Report::new("disc");
    rep.both("family", form.family().id())
        .both("form", form.to_string())
        .both("disc", rational_string(&d.value))
        .both("integral", form.is_integral())
        .both("degenerate", d.degenerate);
    rep.plain = Some(rational_string(&d.value));
    Ok(rep)
}

fn density_report(runner: &Runner, rep: &sqfsieve_core::geosieve::SieveReport, digits: u32) -> Result<Report, RunError> {
    let mut out = sieve_report(rep);
    match runner.euler_factors(rep.family, rep.prime_cutoff) {
        Ok(e) => {
            let value = e.value(digits);
            let partial: BTreeMap<u64, String> =
                e.partial.iter().map(|(p, v)| (*p, Decimal::from_ratio(v, digits).to_string())).collect();
            out.field(
                "euler_product",
                json!({
                    "cutoff": e.cutoff,
                    "value": value.to_string(),
                    "partial": e.partial.iter().map(|(p, v)| json!({ "P": p, "value": Decimal::from_ratio(v, digits).to_string() })).collect::<Vec<_>>(),
                }),
            );
            out.line("euler_product", value);
            if let Some(t) = out.table.as_mut() {
                t.header.push("euler_partial".into());
                for row in &mut t.rows {
                    let p: u64 = row[0].parse().expect("prime column");
                    row.push(partial.get(&p).cloned().unwrap_or_default());
                }
            }
        }
        Err(RunError::Core(Error::BudgetExceeded { needed, budget })) => {
            log::warn!("Euler product skipped: local densities need {needed} steps, budget is {budget}");
            out.field("euler_product", Value::Null);
            out.line("euler_product", "skipped (budget)");
        }
        Err(e) => return Err(e),
    }
    if rep.family == Family::F3 {
        let stated = f3_squarefree_density(digits);
        let euler = f3_euler_limit(digits);
        out.both("stated_limit", stated.to_string()).both("euler_limit", euler.to_string());
    }
    Ok(out)
}

fn cmd_tail(runner: &Runner, family: Family, r: u64, ms: &[u64], skew: Option<&[BigRational]>) -> Result<Report, RunError> {
    let counts = runner.tail_counts(family, r, ms)?;
    let skewed = skew.map(|t| runner.tail_counts_skewed(family, r, t, ms)).transpose()?;
    let mut rep = Report::new("tail_counts");
    rep.both("family", family.id()).both("r", r);
    if let Some(t) = skew {
        rep.field("skew", t.iter().map(rational_string).collect::<Vec<_>>());
    }
    let mut header = vec!["M", "count"];
    if skewed.is_some() {
        header.push("skewed");
    }
    let mut t = Table::new(&header);
    let mut rows = Vec::new();
    for (i, (&m, &c)) in ms.iter().zip(&counts).enumerate() {
        let mut row = vec![m.to_string(), c.to_string()];
        let mut j = json!({ "M": m, "count": c });
        if let Some(s) = &skewed {
            row.push(s[i].to_string());
            j["skewed"] = s[i].into();
        }
        rows.push(j);
        t.push(row);
    }
    rep.field("counts", rows);
    rep.table = Some(t);
    Ok(rep)
}

fn disc_integer(v: &FormVector) -> Result<BigInt, RunError> {
    Ok(disc_int(v)?)
}

/// Applies the move, first normalizing the input when it is not already in the move's normal form.
fn apply_move(kind: MoveKind, v: &FormVector, p: u64) -> Result<(Option<GroupElement>, MoveRecord), Error> {
    let direct = match kind {
        MoveKind::F3Reduce => f3_reduce(v, p),
        MoveKind::F4Reduce => f4_reduce(v, p),
        MoveKind::G3Node => g3_node_move(v, p),
        MoveKind::G2Witness => g2_no_move_witness(v, p),
    };
    match direct {
        Err(Error::Precondition(msg)) => {
            let normalized = match kind {
                MoveKind::F3Reduce => f3_normalize(v, p)?,
                MoveKind::F4Reduce => f4_normalize(v, p)?,
                MoveKind::G3Node => g3_normalize(v, p)?,
                MoveKind::G2Witness => return Err(Error::Precondition(msg)),
            };
            let rec = match kind {
                MoveKind::F3Reduce => f3_reduce(&normalized.1, p)?,
                MoveKind::F4Reduce => f4_reduce(&normalized.1, p)?,
                _ => g3_node_move(&normalized.1, p)?,
            };
            Ok((Some(normalized.0), rec))
        }
        other => other.map(|r| (None, r)),
    }
}

fn cmd_move_one(kind: MoveKind, p: u64, form: &FormVector) -> Result<Report, RunError> {
    if form.family() != kind.family() {
        return Err(Error::ShapeMismatch(format!("{} acts on {} forms, got {}", kind.name(), kind.family(), form.family())).into());
    }
    let (pre, rec) = apply_move(kind, form, p)?;
    let mut rep = move_report(kind.name(), &rec, &disc_integer(form)?, &disc_integer(&rec.output)?);
    if let Some(g) = pre {
        rep.field("normalizer", gamma_json(&g));
        rep.line("normalizer", gamma_json(&g));
    }
    Ok(rep)
}

fn cmd_move_batch(kind: MoveKind, p: u64, samples: u64, bound: i64, seed: u64) -> Result<Report, RunError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p2 = BigInt::from(p * p);
    let (mut ratio_ok, mut integral, mut strong, mut weak, mut other, mut congruent) = (0u64, 0u64, 0u64, 0u64, 0u64, 0u64);
    let mut first: Option<MoveRecord> = None;
    for _ in 0..samples {
        let v = match kind {
            MoveKind::F3Reduce => sample_f3_normal(p, bound, &mut rng),
            MoveKind::F4Reduce => sample_f4_normal(p, bound, &mut rng),
            MoveKind::G3Node => sample_g3_node(p, bound, &mut rng),
            MoveKind::G2Witness => sample_g2_normal(p, bound, &mut rng),
        };
        let (_, rec) = apply_move(kind, &v, p)?;
        let expected = match kind {
            MoveKind::F3Reduce | MoveKind::F4Reduce => disc(&rec.output) * BigRational::from_integer(p2.clone()) == disc(&v),
            _ => disc(&rec.output) == disc(&v),
        };
        ratio_ok += expected as u64;
        integral += rec.output.is_integral() as u64;
        if kind == MoveKind::G3Node {
            let ok = [0usize, 1, 3, 6].iter().all(|&k| {
                let c = &rec.output.coeffs()[k];
                c.is_integer() && (c.to_integer() % BigInt::from(p)) == BigInt::from(0)
            });
            congruent += ok as u64;
        }
        match rec.target_class {
            PointClass::StrongMultiple => strong += 1,
            PointClass::WeakMultiple => weak += 1,
            PointClass::NotMultiple => other += 1,
        }
        first.get_or_insert(rec);
    }
    let mut rep = Report::new("move_batch");
    rep.both("move", kind.name())
        .both("family", kind.family().id())
        .both("p", p)
        .both("instances", samples)
        .both("bound", bound)
        .both("disc_relation_holds", ratio_ok)
        .both("integral_outputs", integral)
        .both("target_strong", strong)
        .both("target_weak", weak)
        .both("target_not_multiple", other);
    if kind == MoveKind::G3Node {
        rep.both("k0_congruences_hold", congruent);
    }
    rep.field("example", first.as_ref().map(crate::report::move_json));
    Ok(rep)
}

fn cmd_embed(form: Option<&FormVector>, samples: u64, bound: i64, seed: u64) -> Result<Report, RunError> {
    let mut rep = Report::new("embed");
    match form {
        Some(v) => {
            let w = phi_embed(v)?;
            let (dv, dw) = (disc(v), disc(&w));
            rep.both("input", v.to_string())
                .both("image", w.to_string())
                .both("disc_input", rational_string(&dv))
                .both("disc_image", rational_string(&dw))
                .both("identity_holds", dv == dw);
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut failures = 0u64;
            for _ in 0..samples {
                let v = random_form_with(Family::G2, bound.unsigned_abs(), &mut rng);
                if disc(&phi_embed(&v)?) != disc(&v) {
                    failures += 1;
                }
            }
            rep.both("samples", samples).both("bound", bound).both("failures", failures);
        }
    }
    Ok(rep)
}

fn cmd_mass(n: u32, primes: &[u64], source: MassSource) -> Result<Report, RunError> {
    let mut rep = Report::new("local_mass");
    rep.both("n", n);
    match source {
        MassSource::Infinite(c) => {
            let m = infinite_mass(n, c)?;
            rep.both("condition", format!("{c:?}")).both("mass", rational_string(&m));
            rep.plain = Some(rational_string(&m));
        }
        MassSource::Closed(c) => {
            rep.both("condition", format!("{c:?}"));
            let mut t = Table::new(&["p", "mass"]);
            let mut rows = Vec::new();
            for &p in primes {
                let m = local_mass(n, p, c)?.mass;
                rows.push(json!({ "p": p, "mass": rational_string(&m) }));
                t.push(vec![p.to_string(), rational_string(&m)]);
            }
            rep.field("masses", rows);
            rep.table = Some(t);
        }
        MassSource::Table { unramified_only } => {
            rep.both("unramified_only", unramified_only);
            let mut t = Table::new(&["p", "algebras", "mass", "oracle"]);
            let mut rows = Vec::new();
            for &p in primes {
                let algebras = etale_table(n, p)?.len();
                let m = mass_from_table(n, p, unramified_only)?;
                let oracle = if unramified_only { None } else { Some(mass_enumerate_oracle(n, p)?) };
                rows.push(json!({
                    "p": p,
                    "algebras": algebras,
                    "mass": rational_string(&m),
                    "oracle": oracle.as_ref().map(rational_string),
                }));
                t.push(vec![p.to_string(), algebras.to_string(), rational_string(&m), oracle.as_ref().map(rational_string).unwrap_or_default()]);
            }
            rep.field("masses", rows);
            rep.table = Some(t);
        }
    }
    Ok(rep)
}

fn sign_name(s: Sign) -> &'static str {
    match s {
        Sign::Plus => "+",
        Sign::Minus => "-",
    }
}

fn cmd_constants(kind: &ConstantKind, n: u32, digits: u32) -> Result<Report, RunError> {
    let mut rep = Report::new("constant");
    match kind {
        ConstantKind::Zeta { s } => {
            let z = zeta(*s, digits)?;
            rep.both("name", format!("zeta({s})")).both("value", z.to_string());
            rep.plain = Some(z.to_string());
        }
        ConstantKind::Thm11 { variant } => {
            let t = theorem11_constant(n, *variant, digits)?;
            let v = match variant {
                Variant::Sqf => "sqf",
                Variant::Fund => "fund",
            };
            rep.both("name", "thm11")
                .both("n", n)
                .both("variant", v)
                .both("rational_part", rational_string(&t.rational_part))
                .both("closed_form", t.closed_form.to_string())
                .both("product_route", t.product_route.to_string())
                .both("agreement_digits", t.agreement_digits);
            rep.plain = Some(t.closed_form.to_string());
        }
        ConstantKind::Cor12 { cutoff } => {
            let c = corollary12_constant(n, *cutoff, digits)?;
            rep.both("name", "cor12").both("n", n);
            rep.field("fundamental", euler_json(&c.fundamental));
            rep.line("fundamental", euler_display(&c.fundamental));
            rep.field("squarefree", euler_json(&c.squarefree));
            rep.line("squarefree", euler_display(&c.squarefree));
            rep.both("ratio", rational_string(&c.ratio));
            rep.plain = Some(euler_display(&c.fundamental));
        }
        ConstantKind::SigmaLimit { inf, overrides, weight } => {
            let inf_mass = infinite_mass(n, *inf)?;
            let masses: BTreeMap<u64, BigRational> = overrides.iter().cloned().collect();
            let s = sigmalimit_constant(n, &inf_mass, &masses, *weight, digits)?;
            rep.both("name", "sigmalimit")
                .both("n", n)
                .both("infinite_condition", format!("{inf:?}"))
                .both("weight", format!("{weight:?}"))
                .both("rational_part", rational_string(&s.rational_part));
            rep.field("overrides", masses.iter().map(|(p, m)| json!({ "p": p, "mass": rational_string(m) })).collect::<Vec<_>>());
            rep.field("value", euler_json(&s.result));
            rep.line("value", euler_display(&s.result));
            rep.plain = Some(euler_display(&s.result));
        }
        ConstantKind::Unramified { sign } => {
            let a = unramified_average(n, *sign)?;
            rep.both("name", "unramified_average")
                .both("n", n)
                .both("sign", sign_name(*sign))
                .both("value", rational_string(&a))
                .both("approx", rational_f64(&a));
            rep.plain = Some(rational_string(&a));
        }
        ConstantKind::CohenLenstra { group, sign } => {
            let c = cohen_lenstra_prediction(group, *sign)?;
            let (order, aut) = abelian_group_orders(group)?;
            rep.both("name", "cohen_lenstra")
                .both("group", format!("{group:?}"))
                .both("sign", sign_name(*sign))
                .both("order", order.to_string())
                .both("aut", aut.to_string())
                .both("value", rational_string(&c))
                .both("approx", rational_f64(&c));
            rep.plain = Some(rational_string(&c));
        }
        ConstantKind::Aut { group } => {
            let (order, aut) = abelian_group_orders(group)?;
            rep.both("name", "aut").both("group", format!("{group:?}")).both("order", order.to_string()).both("aut", aut.to_string());
            let small = order <= BigInt::from(81);
            if small {
                rep.both("aut_bruteforce", aut_bruteforce(group));
            }
            rep.plain = Some(aut.to_string());
        }
        ConstantKind::R2 => {
            let v = r2(n);
            rep.both("name", "r2").both("n", n).both("value", v);
            rep.plain = Some(v.to_string());
        }
        ConstantKind::F3Density => {
            let stated = f3_squarefree_density(digits);
            let euler = f3_euler_limit(digits);
            rep.both("name", "f3_density")
                .both("stated_limit", stated.to_string())
                .both("euler_limit", euler.to_string());
            rep.plain = Some(format!("{euler} (stated closed form {stated})"));
        }
    }
    Ok(rep)
}
