use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use goldman_core::chain::{project_gn, separation_level};
use goldman_core::ideals_int::{
    ideal_check_exhaustive, ideal_check_sampled, ik_family, prop_divisibility_check,
    prop_divisibility_exhaustive, CheckOutcome, Counterexample, ExponentBox, GeometricSubmodule,
};
use goldman_core::ideals_rat::{contains, ideal_closure, RationalIdeal};
use goldman_core::liealg::bracket;
use goldman_core::selftest::{run_selftest, SelftestOptions};
use goldman_core::words::parse_syllables;
use goldman_core::{
    ab, AnyElement, Coefficient, Error, Integer, ModuleElement, Monomial, Rational, Ring,
    SurfaceSignature, Word,
};
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(name = "goldman", version, about = "Exact computations in the abelianized Goldman Lie algebra")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args, Clone)]
struct SurfaceArgs {
    /// Closed surface of the given genus.
    #[arg(long, value_name = "GENUS", conflicts_with = "boundary")]
    closed: Option<usize>,

    /// Surface of the given genus with the given number of boundary components.
    #[arg(long, num_args = 2, value_names = ["GENUS", "BOUNDARY"])]
    boundary: Option<Vec<usize>>,
}

impl SurfaceArgs {
    fn signature(&self) -> Result<SurfaceSignature, Error> {
        match (&self.closed, &self.boundary) {
            (Some(g), None) => SurfaceSignature::closed(*g),
            (None, Some(gb)) => SurfaceSignature::with_boundary(gb[0], gb[1]),
            _ => Err(Error::InvalidSurface(
                "exactly one of --closed or --boundary is required".into(),
            )),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleKind {
    Ik,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum CriterionKind {
    /// Bracket closure of each generator.
    #[value(name = "lemma")]
    Closure,
    /// Pairwise gcd divisibility.
    #[value(name = "prop")]
    PairGcd,
}

#[derive(Subcommand)]
enum Command {
    /// Bracket of two words or two JSON elements.
    Bracket {
        #[command(flatten)]
        surface: SurfaceArgs,
        left: String,
        right: String,
    },
    /// Abelianize a formal sum of words given as COEF:WORD terms.
    Ab {
        #[arg(long)]
        rank: usize,
        #[arg(long, default_value = "Z")]
        ring: Ring,
        #[arg(required = true, allow_hyphen_values = true)]
        terms: Vec<String>,
    },
    /// Intersection pairing of two words.
    Pair {
        #[command(flatten)]
        surface: SurfaceArgs,
        left: String,
        right: String,
    },
    /// Generators of the center.
    Center {
        #[command(flatten)]
        surface: SurfaceArgs,
    },
    /// Test whether a geometric submodule of Z[A(n)] is an ideal.
    IdealCheck {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long, value_enum)]
        rule: RuleKind,
        /// Exception set of the gcd rule, e.g. "[(1,0),(0,2)]".
        #[arg(long = "K", value_name = "SET")]
        k: Option<String>,
        /// Table entry "(x1,...,xn)=alpha"; repeatable.
        #[arg(long = "entry", value_name = "ENTRY")]
        entries: Vec<String>,
        /// Table value off the listed entries.
        #[arg(long, default_value = "1")]
        default: Integer,
        #[arg(long = "box", value_name = "RADIUS")]
        radius: i64,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long)]
        seed: Option<u64>,
        /// Check every pair in the box instead of sampling.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, value_enum, default_value_t = CriterionKind::Closure)]
        criterion: CriterionKind,
    },
    /// The gcd-rule family grown from an initial exception set.
    IkFamily {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long = "K", value_name = "SET")]
        k: String,
        #[arg(long, default_value_t = 5)]
        count: usize,
    },
    /// Smallest ideal of Q[A(n)] containing the given elements.
    IdealClosure {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long = "gen", value_name = "JSON")]
        generators: Vec<String>,
    },
    /// Membership of an element in an ideal printed by ideal-closure.
    IdealMember {
        #[arg(long)]
        ideal: String,
        #[arg(long)]
        elem: String,
    },
    /// Normal form of a word in Z/2^n * F.
    ChainProject {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        c: usize,
        word: String,
    },
    /// Least level separating the conjugacy classes of two words.
    ChainSeparate {
        #[arg(long)]
        c: usize,
        #[arg(long)]
        nmax: u32,
        a: String,
        b: String,
    },
    /// Run the invariant suites.
    Selftest {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        scale: u64,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

/// A finished command: JSON payload, text rendering, exit code.
struct Output {
    json: String,
    text: String,
    code: u8,
}

impl Output {
    fn ok(json: impl Into<String>, text: impl Into<String>) -> Self {
        Output {
            json: json.into(),
            text: text.into(),
            code: 0,
        }
    }

    fn verdict(json: impl Into<String>, text: impl Into<String>, holds: bool) -> Self {
        Output {
            json: json.into(),
            text: text.into(),
            code: if holds { 0 } else { 1 },
        }
    }
}

fn parse_word(text: &str, rank: usize) -> Result<Word, Error> {
    Word::parse(text, rank)
}

fn parse_monomials(text: &str, rank: usize) -> Result<Vec<Monomial>, Error> {
    let inner = text
        .trim()
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("expected a bracketed list, got `{text}`")))?;
    let mut out = Vec::new();
    let mut rest = inner.trim();
    while !rest.is_empty() {
        let end = rest
            .find(')')
            .ok_or_else(|| Error::Parse(format!("unterminated tuple in `{text}`")))?;
        let m: Monomial = rest[..=end].parse()?;
        if m.rank() != rank {
            return Err(Error::RankMismatch {
                left: rank,
                right: m.rank(),
            });
        }
        out.push(m);
        rest = rest[end + 1..].trim_start().trim_start_matches(',').trim_start();
    }
    Ok(out)
}

fn parse_element_or_word<C: Coefficient>(text: &str, rank: usize) -> Result<ModuleElement<C>, Error> {
    if text.trim_start().starts_with('{') {
        ModuleElement::from_json(text, Some(rank))
    } else {
        ab(&[(C::one(), parse_word(text, rank)?)], rank)
    }
}

fn element_json<C: Coefficient>(u: &ModuleElement<C>) -> String {
    u.to_json()
}

fn bracket_cmd(sig: &SurfaceSignature, left: &str, right: &str) -> Result<Output, Error> {
    let n = sig.rank();
    let rational = |t: &str| {
        t.trim_start().starts_with('{') && matches!(AnyElement::from_json(t, Some(n)), Ok(AnyElement::Rational(_)))
    };
    match (rational(left), rational(right)) {
        (false, false) => {
            let b = bracket(sig, &parse_element_or_word::<Integer>(left, n)?, &parse_element_or_word(right, n)?)?;
            Ok(Output::ok(element_json(&b), b.to_string()))
        }
        (true, true) => {
            let b = bracket(sig, &parse_element_or_word::<Rational>(left, n)?, &parse_element_or_word(right, n)?)?;
            Ok(Output::ok(element_json(&b), b.to_string()))
        }
        _ => Err(Error::Parse("both operands must use the same ring".into())),
    }
}

fn ab_cmd<C: Coefficient>(rank: usize, terms: &[String]) -> Result<Output, Error> {
    let mut sum = Vec::with_capacity(terms.len());
    for t in terms {
        let (coef, word) = t
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("term `{t}` is not COEF:WORD")))?;
        sum.push((C::parse_coefficient(coef.trim())?, parse_word(word, rank)?));
    }
    let u = ab(&sum, rank)?;
    Ok(Output::ok(element_json(&u), u.to_string()))
}

#[derive(Serialize)]
struct CheckReport<'a> {
    verdict: bool,
    checked: u64,
    seed: Option<u64>,
    counterexample: &'a Option<Counterexample>,
}

fn outcome_json(outcome: &CheckOutcome, seed: Option<u64>) -> String {
    to_json(&CheckReport {
        verdict: outcome.holds,
        checked: outcome.checked,
        seed,
        counterexample: &outcome.counterexample,
    })
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string(value).expect("output serializes")
}

#[allow(clippy::too_many_arguments)]
fn ideal_check_cmd(
    sig: &SurfaceSignature,
    rule: RuleKind,
    k: Option<&str>,
    entries: &[String],
    default: Integer,
    radius: i64,
    samples: u64,
    seed: Option<u64>,
    exhaustive: bool,
    criterion: CriterionKind,
) -> Result<Output, Error> {
    let n = sig.rank();
    if radius < 0 {
        return Err(Error::Precondition("--box must be nonnegative".into()));
    }
    let bx = ExponentBox::new(n, radius);
    let sub = match rule {
        RuleKind::Ik => {
            if !entries.is_empty() {
                return Err(Error::Precondition("--entry applies to table rules".into()));
            }
            GeometricSubmodule::ik(n, parse_monomials(k.unwrap_or("[]"), n)?)?
        }
        RuleKind::Table => {
            if k.is_some() {
                return Err(Error::Precondition("--K applies to gcd rules".into()));
            }
            let mut values = Vec::with_capacity(entries.len());
            for e in entries {
                let (m, a) = e
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("entry `{e}` is not TUPLE=VALUE")))?;
                let m: Monomial = m.parse()?;
                if m.rank() != n {
                    return Err(Error::RankMismatch { left: n, right: m.rank() });
                }
                let a: Integer = a
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad alpha value in `{e}`")))?;
                values.push((m, a));
            }
            GeometricSubmodule::table(bx, default, values)?
        }
    };
    let outcome = if exhaustive {
        match criterion {
            CriterionKind::Closure => ideal_check_exhaustive(sig, &sub, bx)?,
            CriterionKind::PairGcd => prop_divisibility_exhaustive(sig, &sub, bx)?,
        }
    } else {
        let seed = seed.ok_or_else(|| Error::Precondition("sampled checks need an explicit --seed".into()))?;
        match criterion {
            CriterionKind::Closure => ideal_check_sampled(sig, &sub, bx, samples, seed)?,
            CriterionKind::PairGcd => prop_divisibility_check(sig, &sub, bx, samples, seed)?,
        }
    };
    let text = match &outcome.counterexample {
        None => format!("ideal: yes ({} pairs checked)", outcome.checked),
        Some(cx) => format!("ideal: no, counterexample {} {}", cx.first, cx.second),
    };
    let seed = if exhaustive { None } else { seed };
    Ok(Output::verdict(outcome_json(&outcome, seed), text, outcome.holds))
}

fn ik_family_cmd(sig: &SurfaceSignature, k: &str, count: usize) -> Result<Output, Error> {
    let n = sig.rank();
    let family = ik_family(n, parse_monomials(k, n)?, count)?;
    let sets: Vec<Vec<Monomial>> = family
        .iter()
        .map(|s| s.exceptions().expect("gcd rule").iter().cloned().collect())
        .collect();
    let text = sets
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let s: Vec<String> = s.iter().map(ToString::to_string).collect();
            format!("K_{i} = [{}]", s.join(", "))
        })
        .collect::<Vec<_>>()
        .join("\n");
    Ok(Output::ok(to_json(&json!({ "sets": sets })), text))
}

fn rational_element(text: &str, rank: Option<usize>) -> Result<ModuleElement<Rational>, Error> {
    match AnyElement::from_json(text, rank)? {
        AnyElement::Rational(u) => Ok(u),
        AnyElement::Integer(_) => Err(Error::Parse("ideal computations need ring Q elements".into())),
    }
}

fn ideal_closure_cmd(sig: &SurfaceSignature, generators: &[String]) -> Result<Output, Error> {
    let gens = generators
        .iter()
        .map(|g| rational_element(g, Some(sig.rank())))
        .collect::<Result<Vec<_>, _>>()?;
    let ideal = ideal_closure(sig, &gens)?;
    Ok(Output::ok(ideal.to_json(), ideal.to_string()))
}

fn ideal_member_cmd(ideal: &str, elem: &str) -> Result<Output, Error> {
    let ideal = RationalIdeal::from_json(ideal)?;
    let sig = SurfaceSignature::from_kind(ideal.surface())?;
    let u = rational_element(elem, Some(sig.rank()))?;
    let holds = contains(&sig, &ideal, &u)?;
    Ok(Output::verdict(to_json(&json!({ "verdict": holds })), format!("member: {holds}"), holds))
}

/// Rank implied by a word and the distinguished generator.
fn chain_rank(texts: &[&str], c: usize) -> Result<usize, Error> {
    let mut rank = c;
    for t in texts {
        for (g, _) in parse_syllables(t)? {
            rank = rank.max(g);
        }
    }
    if rank == 0 {
        return Err(Error::GeneratorOutOfRange { gen: 0, rank: 0 });
    }
    Ok(rank)
}

fn chain_project_cmd(n: u32, c: usize, word: &str) -> Result<Output, Error> {
    let rank = chain_rank(&[word], c)?;
    let p = project_gn(&parse_word(word, rank)?, n, c)?;
    let text = p.to_string();
    Ok(Output::ok(to_json(&json!({ "word": text })), if text.is_empty() { "e".into() } else { text }))
}

fn chain_separate_cmd(c: usize, nmax: u32, a: &str, b: &str) -> Result<Output, Error> {
    let rank = chain_rank(&[a, b], c)?;
    let (a, b) = (parse_word(a, rank)?, parse_word(b, rank)?);
    Ok(match separation_level(&a, &b, c, nmax) {
        Ok(Some(level)) => Output::ok(to_json(&json!({ "level": level })), format!("separated at level {level}")),
        Ok(None) => Output {
            json: to_json(&json!({ "outcome": "not separated", "nmax": nmax })),
            text: format!("not separated up to level {nmax}"),
            code: 1,
        },
        Err(Error::Conjugate) => Output {
            json: to_json(&json!({ "outcome": "conjugate" })),
            text: "conjugate: no level separates them".into(),
            code: 2,
        },
        Err(e) => return Err(e),
    })
}

fn selftest_cmd(seed: u64, scale: u64, inject_fault: bool) -> Output {
    let report = run_selftest(SelftestOptions {
        seed,
        scale,
        symmetric_fault: inject_fault,
    });
    let failed: Vec<&str> = report
        .properties
        .iter()
        .filter(|p| !p.passed)
        .map(|p| p.name.as_str())
        .collect();
    let text = if failed.is_empty() {
        format!("{} properties passed", report.properties.len())
    } else {
        format!("failed: {}", failed.join(", "))
    };
    Output::verdict(to_json(&report), text, report.passed)
}

fn run(cli: Cli) -> Result<Output, Error> {
    match cli.command {
        Command::Bracket { surface, left, right } => bracket_cmd(&surface.signature()?, &left, &right),
        Command::Ab { rank, ring, terms } => match ring {
            Ring::Integer => ab_cmd::<Integer>(rank, &terms),
            Ring::Rational => ab_cmd::<Rational>(rank, &terms),
        },
        Command::Pair { surface, left, right } => {
            let sig = surface.signature()?;
            let (u, v) = (parse_word(&left, sig.rank())?, parse_word(&right, sig.rank())?);
            let value = sig.intersection_pairing(&u, &v)?;
            Ok(Output::ok(to_json(&json!({ "value": value.to_string() })), value.to_string()))
        }
        Command::Center { surface } => {
            let sig = surface.signature()?;
            let gens: Vec<String> = (2 * sig.genus() + 1..=sig.rank())
                .filter(|_| !sig.is_closed())
                .map(|j| format!("a{j}"))
                .collect();
            let text = if gens.is_empty() { "trivial".to_string() } else { gens.join(" ") };
            Ok(Output::ok(to_json(&json!({ "generators": gens })), text))
        }
        Command::IdealCheck {
            surface,
            rule,
            k,
            entries,
            default,
            radius,
            samples,
            seed,
            exhaustive,
            criterion,
        } => ideal_check_cmd(
            &surface.signature()?,
            rule,
            k.as_deref(),
            &entries,
            default,
            radius,
            samples,
            seed,
            exhaustive,
            criterion,
        ),
        Command::IkFamily { surface, k, count } => ik_family_cmd(&surface.signature()?, &k, count),
        Command::IdealClosure { surface, generators } => ideal_closure_cmd(&surface.signature()?, &generators),
        Command::IdealMember { ideal, elem } => ideal_member_cmd(&ideal, &elem),
        Command::ChainProject { n, c, word } => chain_project_cmd(n, c, &word),
        Command::ChainSeparate { c, nmax, a, b } => chain_separate_cmd(c, nmax, &a, &b),
        Command::Selftest {
            seed,
            scale,
            inject_fault,
        } => Ok(selftest_cmd(seed, scale, inject_fault)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match run(cli) {
        Ok(out) => {
            match format {
                Format::Json => println!("{}", out.json),
                Format::Text => println!("{}", out.text),
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            match format {
                Format::Json => eprintln!("{}", json!({ "error": e.to_string() })),
                Format::Text => eprintln!("error: {e}"),
            }
            ExitCode::from(2)
        }
    }
}
