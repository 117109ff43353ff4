//! Command bodies. Each returns the output files it wrote, relative to
//! the output directory.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use ris_mimo::control::{write_trace, McpCodebook};
use ris_mimo::harness::{
    algorithm_efficiency, baseline_capacity, build_codebook, build_scenario, capacity_increase_map, gain_size_sweep,
    icdf, map_line, measure_codeword, median, write_records, AlgorithmKind, ResultRecord, ScenarioConfig, SweepConfig,
    SweepKind, MAP_HEADER,
};
use ris_mimo::link::{measure_link, RisState};
use ris_mimo::par;
use ris_mimo::ris::{power_consumption, PhaseCodeword};
use ris_mimo::seed::{derive, stream};

use crate::CliError;

fn create(out: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    let path = out.join(name);
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    File::create(&path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn io(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}

fn write_result_file(out: &Path, name: &str, records: &[ResultRecord]) -> Result<String, CliError> {
    let mut w = create(out, name)?;
    write_records(&mut w, records)?;
    w.flush().map_err(io)?;
    Ok(name.to_owned())
}

/// Effective configuration, loadable with `--config`.
pub fn write_config_snapshot(cfg: &ScenarioConfig, out: &Path) -> Result<String, CliError> {
    let text = toml::to_string(cfg).map_err(|e| CliError::Io(e.to_string()))?;
    let mut w = create(out, "config.toml")?;
    w.write_all(text.as_bytes()).map_err(io)?;
    w.flush().map_err(io)?;
    Ok("config.toml".into())
}

fn load_codebook(cfg: &ScenarioConfig) -> Result<Option<McpCodebook>, CliError> {
    if cfg.algorithm.kind != AlgorithmKind::Mpc {
        return Ok(None);
    }
    let path = cfg.algorithm.codebook.as_ref().ok_or_else(|| {
        CliError::Config(
            "algorithm mpc needs a codebook: create one with `ris-mimo codebook --config <file> --out <dir>` \
             and pass `--codebook <dir>/codebook.txt`"
                .into(),
        )
    })?;
    let f = File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(Some(McpCodebook::read_text(BufReader::new(f))?))
}

pub fn simulate(
    cfg: &ScenarioConfig,
    out: &Path,
    no_ris: bool,
    codeword: Option<&str>,
) -> Result<Vec<String>, CliError> {
    let ris = cfg.array_config()?;
    let cw = match codeword {
        Some(s) => {
            let c: PhaseCodeword = s.parse()?;
            c.validate(&ris)?;
            c
        }
        None => PhaseCodeword::zeros(ris.k()),
    };
    let q = cfg.constellation()?;
    let records = par::try_map_range(cfg.seeds.trials, |t| -> Result<ResultRecord, ris_mimo::Error> {
        let scenario = build_scenario(cfg, &ris, None, t)?;
        let link_seed = derive(cfg.seeds.master, &[stream::LINK, 0, t as u64]);
        let base = baseline_capacity(cfg, &scenario)?;
        let (m, algorithm, power) = if no_ris {
            let state = RisState::Absent {
                include_sm: cfg.link.include_sm_in_baseline,
            };
            let m = measure_link(
                &scenario.channels,
                &state,
                &scenario.noise,
                &q,
                cfg.link.n_frames,
                link_seed,
            )?;
            (m, "no-ris", 0.0)
        } else {
            (
                measure_codeword(cfg, &scenario, &cw, link_seed)?,
                "fixed",
                power_consumption(&ris),
            )
        };
        Ok(ResultRecord {
            scenario_id: format!("{}/t{t}", cfg.id),
            seed: cfg.seeds.master,
            algorithm: algorithm.into(),
            probes: 0,
            capacity: m.capacity,
            snr_db: m.snr_db,
            ber: m.uncoded_ber,
            delta_c: m.capacity - base,
            power_mw: power,
        })
    })?;
    for r in &records {
        println!(
            "{}: capacity {:.4} bps/Hz, SNR {:.2} dB, BER {:.3e}, dC {:+.4}",
            r.scenario_id, r.capacity, r.snr_db, r.ber, r.delta_c
        );
    }
    Ok(vec![write_result_file(out, "results.csv", &records)?])
}

pub fn optimize(cfg: &ScenarioConfig, out: &Path) -> Result<Vec<String>, CliError> {
    let codebook = load_codebook(cfg)?;
    let reports = ris_mimo::harness::run_state_trials(cfg, codebook.as_ref())?;
    let mut files = Vec::new();

    let records: Vec<ResultRecord> = reports.iter().map(|r| r.record(cfg.seeds.master)).collect();
    files.push(write_result_file(out, "results.csv", &records)?);

    let mut w = create(out, "states.csv")?;
    writeln!(w, "trial,state,snr_db,capacity,uncoded_ber").map_err(io)?;
    for r in &reports {
        for line in r.to_table().lines().skip(1) {
            writeln!(w, "{},{line}", r.trial).map_err(io)?;
        }
    }
    w.flush().map_err(io)?;
    files.push("states.csv".into());

    for r in &reports {
        let name = format!("traces/trace_t{}.csv", r.trial);
        let mut w = create(out, &name)?;
        write_trace(&mut w, &r.result.trace)?;
        w.flush().map_err(io)?;
        files.push(name);
    }

    let med = |f: &dyn Fn(&ris_mimo::harness::StateReport) -> f64| {
        median(&reports.iter().map(f).collect::<Vec<_>>()).expect("at least one trial")
    };
    println!("{} over {} trials (medians):", cfg.algorithm.kind, reports.len());
    println!("  state        SNR dB   capacity  BER");
    for (name, f) in [
        (
            "without RIS",
            (|r: &ris_mimo::harness::StateReport| r.without_ris) as fn(&_) -> _,
        ),
        ("initial", |r| r.initial),
        ("best", |r| r.best),
        ("diff", |r| r.diff),
    ] {
        println!(
            "  {name:<12} {:>7.2}  {:>8.4}  {:.3e}",
            med(&|r| f(r).snr_db),
            med(&|r| f(r).capacity),
            med(&|r| f(r).uncoded_ber)
        );
    }
    println!("  probes per run: {}", reports[0].result.probe_count);
    Ok(files)
}

pub fn codebook(cfg: &ScenarioConfig, out: &Path) -> Result<Vec<String>, CliError> {
    let ris = cfg.array_config()?;
    let cb = build_codebook(cfg, &ris)?;
    let mut w = create(out, "codebook.txt")?;
    cb.write_text(&mut w)?;
    w.flush().map_err(io)?;
    println!("{} codebook entries for K = {}", cb.len(), ris.k());
    Ok(vec!["codebook.txt".into()])
}

pub fn sweep(cfg: &ScenarioConfig, out: &Path) -> Result<Vec<String>, CliError> {
    let sw = cfg.sweep.clone().unwrap_or_else(SweepConfig::default);
    let records: Vec<ResultRecord> = match sw.kind {
        SweepKind::GainSize => {
            let cells = gain_size_sweep(cfg, &sw.sizes, &sw.gains_db, sw.include_passive, sw.icdf_level)?;
            for c in &cells {
                println!(
                    "{:<24} dC(ICDF {}) {:+.4}  power {:.4} mW",
                    c.label(),
                    sw.icdf_level,
                    c.delta_c.value,
                    c.power_mw
                );
            }
            cells.iter().map(|c| c.record(cfg, cfg.algorithm.kind)).collect()
        }
        SweepKind::Efficiency => {
            let points = algorithm_efficiency(cfg, &sw.algorithms, &sw.sizes, sw.icdf_level)?;
            for p in &points {
                println!(
                    "{0:>2}x{0:<2} {1:<10} log4(probes) {2:.3}  dC(ICDF {3}) {4:+.4}",
                    p.side, p.algorithm, p.log4_probes, sw.icdf_level, p.delta_c.value
                );
            }
            points.iter().map(|p| p.record(cfg)).collect()
        }
    };
    Ok(vec![write_result_file(out, "sweep.csv", &records)?])
}

pub fn map(cfg: &ScenarioConfig, out: &Path) -> Result<Vec<String>, CliError> {
    let grid = cfg
        .map
        .as_ref()
        .ok_or_else(|| CliError::Config("map: the configuration has no [map] section".into()))?;
    let codebook = load_codebook(cfg)?;
    let ris = cfg.array_config()?;
    let samples = capacity_increase_map(cfg, &grid.positions(), 0, codebook.as_ref())?;
    let mut w = create(out, "map.csv")?;
    writeln!(w, "{MAP_HEADER}").map_err(io)?;
    for s in &samples {
        writeln!(w, "{}", map_line(cfg, &ris, s)).map_err(io)?;
    }
    w.flush().map_err(io)?;
    let dc: Vec<f64> = samples.iter().map(|s| s.delta_c).collect();
    let level = cfg
        .sweep
        .as_ref()
        .map_or(ris_mimo::harness::DEFAULT_ICDF_LEVEL, |s| s.icdf_level);
    println!(
        "{} positions, dC ICDF({level}) = {:+.4}",
        samples.len(),
        icdf(&dc, level)?.value
    );
    Ok(vec!["map.csv".into()])
}
