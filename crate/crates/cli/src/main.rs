use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use frs_gap::harness::config::parse_pairs;
use frs_gap::harness::sweep::{run_trend, sweep, SweepItem};
use frs_gap::harness::{run, ExperimentConfig, ExperimentKind};
use frs_gap::harness::line_gap::make_decoder;
use frs_gap::rational::format_rational;
use frs_gap::{block_distance, Error, Word};

#[derive(Parser)]
#[command(name = "frs", version, about = "Folded Reed-Solomon proximity-gap experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode comma-separated message coefficients.
    Encode {
        coeffs: String,
        #[command(flatten)]
        common: Common,
    },
    /// List-decode a comma-separated word at radius --delta, or without a
    /// word, check the decoder against brute force.
    Decode {
        word: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Random subspace-design sums and exhaustive block collisions.
    DesignCheck {
        #[command(flatten)]
        common: Common,
    },
    /// Pinning-set success rates on random code subspaces.
    PinTest {
        #[command(flatten)]
        common: Common,
    },
    /// Line proximity-gap dichotomy.
    LineGap {
        #[command(flatten)]
        common: Common,
    },
    /// Affine proximity gap through lines at a far point.
    AffineGap {
        /// Affine dimension.
        #[arg(long)]
        ell: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Campaign over grid axes, or the field-size trend.
    Sweep {
        /// Axis as KEY=V1,V2,...; repeatable.
        #[arg(long = "grid", value_name = "KEY=VALUES")]
        grid: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Default)]
struct Common {
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    t1: Option<String>,
    #[arg(long)]
    t2: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    preset: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Flat key=value file; flags take precedence.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Any other config key as KEY=VALUE; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Common {
    fn flag_pairs(&self) -> Result<Vec<(String, String)>, Error> {
        let named = [
            ("preset", &self.preset),
            ("q", &self.q),
            ("gamma", &self.gamma),
            ("m", &self.m),
            ("n", &self.n),
            ("k", &self.k),
            ("delta", &self.delta),
            ("r", &self.r),
            ("t1", &self.t1),
            ("t2", &self.t2),
            ("eps", &self.eps),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("mode", &self.mode),
        ];
        let mut out: Vec<(String, String)> =
            named.iter().filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone()))).collect();
        for kv in &self.set {
            out.push(split_kv(kv)?);
        }
        Ok(out)
    }

    /// Environment seed, then the config file, then flags.
    fn resolve(&self, extra: Vec<(String, String)>) -> Result<ExperimentConfig, Error> {
        let mut pairs = Vec::new();
        if let Ok(seed) = std::env::var("FRS_SEED") {
            pairs.push(("seed".to_string(), seed));
        }
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            pairs.extend(parse_pairs(&text)?);
        }
        pairs.extend(self.flag_pairs()?);
        pairs.extend(extra);
        ExperimentConfig::from_pairs(pairs)
    }

    fn emit(&self, text: &str) -> Result<(), Error> {
        match &self.out {
            Some(path) => fs::write(path, text).map_err(|e| Error::Config(format!("{}: {e}", path.display()))),
            None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Error::Config(format!("stdout: {e}"))),
        }
    }
}

fn split_kv(kv: &str) -> Result<(String, String), Error> {
    kv.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .ok_or_else(|| Error::Config(format!("expected KEY=VALUE, got '{kv}'")))
}

fn parse_values(text: &str) -> Result<Vec<u64>, Error> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse().map_err(|_| Error::Config(format!("not an integer: '{s}'"))))
        .collect()
}

enum Outcome {
    Pass,
    Violation,
}

fn encode(coeffs: &str, common: &Common) -> Result<Outcome, Error> {
    let cfg = common.resolve(Vec::new())?;
    let p = cfg.code_params()?;
    let values = parse_values(coeffs)?;
    if values.len() > p.k() {
        return Err(Error::Config(format!("{} coefficients for k = {}", values.len(), p.k())));
    }
    let coeffs: Vec<_> = values.iter().map(|&v| p.field().elem(v)).collect();
    let word = p.encode_coeffs(&coeffs)?;
    common.emit(&format!("{}\n", json!({ "record": "encode", "message": coeffs, "word": word })))?;
    Ok(Outcome::Pass)
}

fn decode(word: &str, common: &Common) -> Result<Outcome, Error> {
    let cfg = common.resolve(Vec::new())?;
    let p = cfg.code_params()?;
    let values = parse_values(word)?;
    if values.len() != p.length() {
        return Err(Error::Config(format!("word has {} entries, expected m*n = {}", values.len(), p.length())));
    }
    let y = Word::new(p.m(), values.iter().map(|&v| p.field().elem(v)).collect())?;
    let decoder = make_decoder(&cfg, &p)?;
    let res = decoder.decode(&y, cfg.delta)?;
    let list: Vec<_> = res
        .list
        .iter()
        .map(|c| Ok(json!({ "message": c.message, "distance": format_rational(&block_distance(&c.word, &y)?) })))
        .collect::<Result<_, Error>>()?;
    let out = json!({
        "record": "decode",
        "radius": format_rational(&res.radius),
        "complete": res.complete,
        "list": list,
    });
    common.emit(&format!("{out}\n"))?;
    Ok(Outcome::Pass)
}

fn experiment(kind: ExperimentKind, common: &Common, extra: Vec<(String, String)>) -> Result<Outcome, Error> {
    let mut pairs = vec![("experiment".to_string(), kind.as_str().to_string())];
    pairs.extend(extra);
    let cfg = common.resolve(pairs)?;
    let report = run(&cfg)?;
    eprintln!("{kind}: {} trials in {:.3}s", report.trials.len(), report.elapsed.as_secs_f64());
    common.emit(&report.to_json_lines())?;
    Ok(if report.passed() { Outcome::Pass } else { Outcome::Violation })
}

fn campaign(grid: &[String], common: &Common) -> Result<Outcome, Error> {
    let mut extra = Vec::new();
    for axis in grid {
        let (k, v) = split_kv(axis)?;
        extra.push((format!("grid-{k}"), v));
    }
    let cfg = common.resolve(extra)?;
    let start = std::time::Instant::now();
    let items = if cfg.grid.is_empty() && cfg.experiment == ExperimentKind::Trend {
        vec![SweepItem::Report(run_trend(&cfg)?)]
    } else {
        sweep(&cfg)
    };
    eprintln!("sweep: {} reports in {:.3}s", items.len(), start.elapsed().as_secs_f64());
    let text: String = items.iter().map(SweepItem::to_json_lines).collect();
    common.emit(&text)?;
    Ok(if items.iter().all(SweepItem::passed) { Outcome::Pass } else { Outcome::Violation })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Encode { coeffs, common } => encode(coeffs, common),
        Command::Decode { word: Some(word), common } => decode(word, common),
        Command::Decode { word: None, common } => experiment(ExperimentKind::DecoderCheck, common, Vec::new()),
        Command::DesignCheck { common } => experiment(ExperimentKind::DesignCheck, common, Vec::new()),
        Command::PinTest { common } => experiment(ExperimentKind::PinTest, common, Vec::new()),
        Command::LineGap { common } => experiment(ExperimentKind::LineGap, common, Vec::new()),
        Command::AffineGap { ell, common } => {
            let extra = ell.iter().map(|e| ("ell".to_string(), e.clone())).collect();
            experiment(ExperimentKind::AffineGap, common, extra)
        }
        Command::Sweep { grid, common } => campaign(grid, common),
    };
    match result {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Violation) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use frs_gap::rational::parse_rational;

    #[test]
    fn flags_override_file_and_env() {
        let dir = std::env::temp_dir().join(format!("frs-cli-unit-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        fs::write(&path, "trials=3\ndelta=1/8\n").unwrap();
        let common = Common { config: Some(path), delta: Some("1/4".into()), ..Default::default() };
        let cfg = common.resolve(Vec::new()).unwrap();
        assert_eq!(cfg.trials, 3);
        assert_eq!(cfg.delta, parse_rational("1/4").unwrap());
        fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn kv_parsing() {
        assert_eq!(split_kv("a = 1").unwrap(), ("a".to_string(), "1".to_string()));
        assert!(split_kv("a").is_err());
        assert_eq!(parse_values("1, 2,3").unwrap(), vec![1, 2, 3]);
        assert!(parse_values("1,x").is_err());
    }
}
