use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use mbic::container::{write_container, Container, ErasureSidecar, ReadPath};
use mbic::mbic::{predicted_distances, DistanceReport, Quantity, Status, M};
use mbic::presets::Preset;
use mbic::sim::{simulate, SimConfig};
use mbic::verify::{verify_layout, verify_preset, Budget, VerificationReport};
use mbic::{Construction, Elem, ErasurePattern, Error, Field, Layout, MbicParams, Message, Result};

#[derive(Parser)]
#[command(
    name = "mbic",
    version,
    about = "Multi-block interleaved codes: parameters, containers, verification, simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print predicted distances, the distance bound and the regime.
    Params(ParamsArgs),
    /// Encode symbols into a container.
    Encode(EncodeArgs),
    /// Read sub-units from a container.
    Read(ReadArgs),
    /// Decode whole write units with the global decoder.
    DecodeFull(DecodeFullArgs),
    /// Run the distance oracles; exit code 0 iff every check passes.
    Verify(VerifyArgs),
    /// Simulate reads over a symbol erasure channel.
    Simulate(SimulateArgs),
}

#[derive(Args, Clone, Default)]
struct CodeArgs {
    /// Named parameter set (P1..P4); other flags override it.
    #[arg(long)]
    preset: Option<Preset>,
    /// Field as `p,w,modulus`; modulus is an integer (sum of c_i p^i, `0x` allowed)
    /// or colon-separated coefficients from x^0 up.
    #[arg(long)]
    field: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    t: Option<usize>,
    /// c3 or k3.
    #[arg(long)]
    construction: Option<Construction>,
}

#[derive(Args)]
struct ParamsArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Write a JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct EncodeArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Raw symbol file (one byte per symbol, two bytes little-endian when q > 256);
    /// its length must be a multiple of 3k symbols.
    #[arg(long, conflicts_with = "random")]
    input: Option<PathBuf>,
    /// Encode this many random write units instead of reading `--input`.
    #[arg(long)]
    random: Option<u64>,
    #[arg(long)]
    output: PathBuf,
    /// Also write an erasure sidecar with i.i.d. erasures of this probability.
    #[arg(long, requires = "sidecar")]
    erase_prob: Option<f64>,
    #[arg(long)]
    sidecar: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ReadArgs {
    #[arg(long)]
    container: PathBuf,
    /// Erasure sidecar for the container.
    #[arg(long)]
    erasures: Option<PathBuf>,
    /// Block index (0-based); omit to read every sub-unit of every block.
    #[arg(long, requires = "sub_block")]
    block: Option<u64>,
    /// Sub-block index (0-based).
    #[arg(long, requires = "block")]
    sub_block: Option<usize>,
    /// Write the recovered symbols here.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct DecodeFullArgs {
    #[arg(long)]
    container: PathBuf,
    #[arg(long)]
    erasures: Option<PathBuf>,
    /// Block index (0-based); omit to decode every block.
    #[arg(long)]
    block: Option<u64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Largest number of codewords enumerated per subcode.
    #[arg(long, default_value_t = 1 << 26)]
    max_messages: u128,
    /// Largest number of candidates for the two-sub-block witness search.
    #[arg(long, default_value_t = 1 << 26)]
    max_witness: u128,
    /// Largest number of column subsets for the exhaustive rank oracle.
    #[arg(long, default_value_t = 200_000)]
    max_subsets: u128,
    /// Sampled subsets when the rank oracle cannot be exhaustive.
    #[arg(long, default_value_t = 20_000)]
    samples: usize,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Per-symbol erasure probability.
    #[arg(long)]
    erase_prob: f64,
    #[arg(long, default_value_t = 10_000)]
    blocks: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative read frequency per sub-block, `a,b,c`.
    #[arg(long, default_value = "1,1,1")]
    workload: String,
    #[arg(long)]
    report: Option<PathBuf>,
}

fn parse_field(spec: &str) -> Result<Field> {
    let bad = || Error::InvalidParams(format!("cannot parse field {spec:?}, expected p,w,modulus"));
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    let [p, w, m] = parts[..] else {
        return Err(bad());
    };
    let p: u32 = p.parse().map_err(|_| bad())?;
    let w: u32 = w.parse().map_err(|_| bad())?;
    let coeffs: Vec<u32> = if m.contains(':') {
        m.split(':')
            .map(|c| c.parse().map_err(|_| bad()))
            .collect::<Result<_>>()?
    } else {
        let mut v = match m.strip_prefix("0x") {
            Some(hex) => u64::from_str_radix(hex, 16),
            None => m.parse(),
        }
        .map_err(|_| bad())?;
        if p < 2 {
            return Err(Error::NotPrime(p));
        }
        let mut c = Vec::new();
        while v > 0 {
            c.push((v % p as u64) as u32);
            v /= p as u64;
        }
        c
    };
    Field::new(p, w, &coeffs)
}

fn default_field(n: usize) -> Result<Field> {
    (2..=8)
        .find(|w| ((1usize << w) - 1).is_multiple_of(n))
        .map(|w| Field::binary(w).expect("built-in modulus"))
        .ok_or_else(|| {
            Error::InvalidParams(format!(
                "no GF(2^w), w <= 8, has n = {n} dividing q-1; pass --field"
            ))
        })
}

impl CodeArgs {
    fn shape(&self) -> Result<(usize, usize, usize)> {
        let base = self.preset.map(Preset::shape);
        let get = |v: Option<usize>, i: usize, name: &str| {
            v.or(base.map(|b| [b.0, b.1, b.2][i]))
                .ok_or_else(|| Error::InvalidParams(format!("missing --{name} (or --preset)")))
        };
        Ok((
            get(self.n, 0, "n")?,
            get(self.k, 1, "k")?,
            get(self.t, 2, "t")?,
        ))
    }

    fn field(&self, n: usize) -> Result<Arc<Field>> {
        Ok(Arc::new(match (&self.field, self.preset) {
            (Some(spec), _) => parse_field(spec)?,
            (None, Some(p)) if p.shape().0 == n => (*p.field()).clone(),
            (None, _) => default_field(n)?,
        }))
    }

    fn construction(&self) -> Result<Construction> {
        self.construction
            .or(self.preset.map(Preset::construction))
            .ok_or_else(|| Error::InvalidParams("missing --construction (or --preset)".into()))
    }

    fn params(&self) -> Result<MbicParams> {
        let (n, k, t) = self.shape()?;
        MbicParams::new(self.field(n)?, n, k, t, self.construction()?)
    }
}

fn write_report(path: &Option<PathBuf>, value: &serde_json::Value) -> Result<()> {
    if let Some(path) = path {
        let text = serde_json::to_string_pretty(value).map_err(|e| Error::Format(e.to_string()))?;
        fs::write(path, text + "\n")?;
    }
    Ok(())
}

fn print_report(params: &MbicParams, r: &DistanceReport) {
    let f = params.field();
    println!(
        "construction={} n={} k={} t={} field=GF({}^{})",
        r.construction,
        params.n(),
        params.k(),
        params.t(),
        f.characteristic(),
        f.degree()
    );
    let kv = |name: &str, q: &Quantity| match q.status {
        Status::LowerBounded => format!("{name}>={}", q.value),
        _ => format!("{name}={}", q.value),
    };
    println!(
        "{} {} {} {} {}",
        kv("delta", &r.delta),
        kv("d1", &r.d1),
        kv("d2", &r.d2),
        kv("d3", &r.d3),
        kv("d", &r.d)
    );
    match r.bound {
        Some(b) => println!(
            "bound={b} optimal={}",
            if r.optimal() { "yes" } else { "no" }
        ),
        None => println!("bound=n/a"),
    }
    println!(
        "regime={} theorem_range={}",
        if r.d1_limited() {
            "d1-limited"
        } else {
            "d2-limited"
        },
        if r.in_theorem_range { "yes" } else { "no" }
    );
}

fn cmd_params(args: ParamsArgs) -> Result<ExitCode> {
    let (n, k, t) = args.code.shape()?;
    let field = args.code.field(n)?;
    let explicit = args.code.construction.or(args
        .code
        .preset
        .filter(|p| *p != Preset::P4)
        .map(Preset::construction));
    let constructions = match explicit {
        Some(c) => vec![c],
        None => vec![Construction::C3, Construction::K3],
    };
    let mut reports = Vec::new();
    let mut first_err = None;
    for &c in &constructions {
        match MbicParams::new(field.clone(), n, k, t, c) {
            Ok(params) => {
                let r = params.predicted_distances();
                print_report(&params, &r);
                reports.push(r);
            }
            Err(e) => {
                if constructions.len() == 2 {
                    println!("construction={c} error={e}");
                }
                first_err.get_or_insert(e);
            }
        }
    }
    if constructions.len() == 2 {
        let c3 = predicted_distances(Construction::C3, n, k, t).d.value;
        let k3 = (t % 2 == 0).then(|| predicted_distances(Construction::K3, n, k, t).d.value);
        let threshold = 2.0 * (n - k + 1) as f64 / 7.0;
        let advice = match k3 {
            Some(k3) if reports.len() == 2 && k3 > c3 => "K3",
            _ => "C3",
        };
        println!(
            "compare c3_d={c3} k3_d={} crossover_t={threshold:.2} advice={advice}",
            k3.map_or("n/a".into(), |d| d.to_string())
        );
    }
    write_report(
        &args.report,
        &json!({ "n": n, "k": k, "t": t, "reports": reports }),
    )?;
    match (reports.is_empty(), first_err) {
        (true, Some(e)) => Err(e),
        _ => Ok(ExitCode::SUCCESS),
    }
}

fn read_symbol_file(path: &Path, field: &Field) -> Result<Vec<Elem>> {
    let bytes = fs::read(path)?;
    let symbols: Vec<Elem> = if field.order() <= 256 {
        bytes.iter().map(|&b| b as Elem).collect()
    } else {
        if bytes.len() % 2 != 0 {
            return Err(Error::Format("odd byte count for 2-byte symbols".into()));
        }
        bytes
            .chunks_exact(2)
            .map(|c| u16::from_le_bytes([c[0], c[1]]))
            .collect()
    };
    if let Some(&s) = symbols.iter().find(|&&s| !field.contains(s as u32)) {
        return Err(Error::Format(format!(
            "input symbol {s} outside GF({})",
            field.order()
        )));
    }
    Ok(symbols)
}

fn write_symbol_file(path: &Path, field: &Field, symbols: &[Elem]) -> Result<()> {
    let bytes: Vec<u8> = if field.order() <= 256 {
        symbols.iter().map(|&s| s as u8).collect()
    } else {
        symbols.iter().flat_map(|s| s.to_le_bytes()).collect()
    };
    fs::write(path, bytes)?;
    Ok(())
}

fn cmd_encode(args: EncodeArgs) -> Result<ExitCode> {
    let params = args.code.params()?;
    let (n, k, q) = (params.n(), params.k(), params.field().order());
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let symbols = match (&args.input, args.random) {
        (Some(path), _) => read_symbol_file(path, params.field())?,
        (None, Some(count)) => (0..count as usize * M * k)
            .map(|_| rng.gen_range(0..q) as Elem)
            .collect(),
        (None, None) => return Err(Error::InvalidParams("pass --input or --random".into())),
    };
    if symbols.len() % (M * k) != 0 {
        return Err(Error::LengthMismatch {
            expected: symbols.len().div_ceil(M * k) * M * k,
            actual: symbols.len(),
        });
    }
    let messages = symbols
        .chunks(M * k)
        .map(|c| Message::from_symbols(k, c.to_vec()))
        .collect::<Result<Vec<_>>>()?;
    let blocks = write_container(&args.output, &params, &messages)?;
    println!("blocks={blocks} symbols={}", symbols.len());
    if let Some(path) = &args.sidecar {
        let prob = args.erase_prob.unwrap_or(0.0);
        if !(0.0..=1.0).contains(&prob) {
            return Err(Error::InvalidParams(format!(
                "erasure probability {prob} not in [0, 1]"
            )));
        }
        let patterns = (0..blocks)
            .map(|_| ErasurePattern::from_mask(n, (0..M * n).map(|_| rng.gen_bool(prob)).collect()))
            .collect::<Result<Vec<_>>>()?;
        let sidecar = ErasureSidecar::new(n, patterns)?;
        sidecar.write(path)?;
        let erased: usize = sidecar.patterns().iter().map(ErasurePattern::total).sum();
        println!("sidecar_erasures={erased}");
    }
    Ok(ExitCode::SUCCESS)
}

fn open_with_sidecar(
    container: &Path,
    erasures: &Option<PathBuf>,
) -> Result<(Container, Option<ErasureSidecar>)> {
    let c = Container::open(container)?;
    let sidecar = match erasures {
        Some(p) => Some(ErasureSidecar::read(p, c.params().n(), c.block_count())?),
        None => None,
    };
    Ok((c, sidecar))
}

fn profile_str(p: &[usize; M]) -> String {
    p.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn cmd_read(args: ReadArgs) -> Result<ExitCode> {
    let (mut c, sidecar) = open_with_sidecar(&args.container, &args.erasures)?;
    let field = c.params().field().clone();
    if let (Some(block), Some(j)) = (args.block, args.sub_block) {
        let r = c.read_subunit(block, j, sidecar.as_ref())?;
        let path = match r.path {
            ReadPath::Local => "local".to_string(),
            ReadPath::Escalated(p) => format!("escalated ({p:?})"),
        };
        println!(
            "block={block} sub_block={j} path={path} symbols_read={} profile={}",
            c.symbols_read(),
            profile_str(&r.profile)
        );
        println!(
            "data={}",
            r.data
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(",")
        );
        if let Some(out) = &args.output {
            write_symbol_file(out, &field, &r.data)?;
        }
        return Ok(ExitCode::SUCCESS);
    }
    let (mut local, mut escalated, mut unrecoverable) = (0u64, 0u64, 0u64);
    let mut data = Vec::new();
    for block in 0..c.block_count() {
        for j in 0..M {
            match c.read_subunit(block, j, sidecar.as_ref()) {
                Ok(r) => {
                    match r.path {
                        ReadPath::Local => local += 1,
                        ReadPath::Escalated(_) => escalated += 1,
                    }
                    data.extend_from_slice(&r.data);
                }
                Err(Error::Unrecoverable { profile, .. }) => {
                    unrecoverable += 1;
                    eprintln!(
                        "unrecoverable block={block} sub_block={j} profile={}",
                        profile_str(&profile)
                    );
                    data.extend(std::iter::repeat_n(0, c.params().k()));
                }
                Err(e) => return Err(e),
            }
        }
    }
    let reads = local + escalated + unrecoverable;
    println!("reads={reads}");
    println!("local={local}");
    println!("escalated={escalated}");
    println!("unrecoverable={unrecoverable}");
    println!("symbols_read={}", c.symbols_read());
    if let Some(out) = &args.output {
        write_symbol_file(out, &field, &data)?;
    }
    write_report(
        &args.report,
        &json!({ "reads": reads, "local": local, "escalated": escalated, "unrecoverable": unrecoverable, "symbols_read": c.symbols_read() }),
    )?;
    Ok(if unrecoverable == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_decode_full(args: DecodeFullArgs) -> Result<ExitCode> {
    let (mut c, sidecar) = open_with_sidecar(&args.container, &args.erasures)?;
    let field = c.params().field().clone();
    let blocks: Vec<u64> = match args.block {
        Some(b) => vec![b],
        None => (0..c.block_count()).collect(),
    };
    let mut data = Vec::new();
    let mut failed = false;
    for b in blocks {
        match c.decode_full(b, sidecar.as_ref()) {
            Ok((m, path)) => {
                println!("block={b} status=ok path={path:?}");
                data.extend_from_slice(m.symbols());
            }
            Err(Error::Unrecoverable { profile, .. }) => {
                println!(
                    "block={b} status=unrecoverable profile={}",
                    profile_str(&profile)
                );
                failed = true;
            }
            Err(e) => return Err(e),
        }
    }
    if let Some(out) = &args.output {
        write_symbol_file(out, &field, &data)?;
    }
    Ok(if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    let budget = Budget {
        max_messages: args.max_messages,
        max_witness: args.max_witness,
        max_subsets: args.max_subsets,
        samples: args.samples,
        seed: args.seed,
    };
    let custom = args.code.n.is_some()
        || args.code.k.is_some()
        || args.code.t.is_some()
        || args.code.field.is_some()
        || args.code.construction.is_some();
    let report = match args.code.preset {
        Some(p) if !custom => verify_preset(p, &budget),
        _ => {
            let params = args.code.params()?;
            let label = format!(
                "n{}k{}t{}{}",
                params.n(),
                params.k(),
                params.t(),
                params.construction()
            );
            let (_, records) = verify_layout(&Layout::new(params)?, &budget);
            VerificationReport {
                preset: label,
                records,
            }
        }
    };
    for line in report.lines() {
        println!("{line}");
    }
    println!("result={}", if report.passed() { "pass" } else { "fail" });
    write_report(
        &args.report,
        &serde_json::to_value(&report).map_err(|e| Error::Format(e.to_string()))?,
    )?;
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_simulate(args: SimulateArgs) -> Result<ExitCode> {
    let params = args.code.params()?;
    let weights: Vec<f64> = args
        .workload
        .split(',')
        .map(|w| {
            w.trim()
                .parse()
                .map_err(|_| Error::InvalidParams(format!("bad workload {:?}", args.workload)))
        })
        .collect::<Result<_>>()?;
    let workload: [f64; M] = weights
        .try_into()
        .map_err(|_| Error::InvalidParams("workload needs 3 weights".into()))?;
    let cfg = SimConfig {
        erase_prob: args.erase_prob,
        blocks: args.blocks,
        seed: args.seed,
        workload,
    };
    let stats = simulate(&Layout::new(params.clone())?, &cfg)?;
    println!(
        "construction={} n={} k={} t={} erase_prob={} blocks={} seed={}",
        params.construction(),
        params.n(),
        params.k(),
        params.t(),
        cfg.erase_prob,
        cfg.blocks,
        cfg.seed
    );
    for line in stats.lines() {
        println!("{line}");
    }
    write_report(
        &args.report,
        &json!({
            "construction": params.construction().to_string(),
            "n": params.n(), "k": params.k(), "t": params.t(),
            "erase_prob": cfg.erase_prob, "blocks": cfg.blocks, "seed": cfg.seed,
            "workload": cfg.workload,
            "stats": stats,
        }),
    )?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Params(a) => cmd_params(a),
        Command::Encode(a) => cmd_encode(a),
        Command::Read(a) => cmd_read(a),
        Command::DecodeFull(a) => cmd_decode_full(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Simulate(a) => cmd_simulate(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
