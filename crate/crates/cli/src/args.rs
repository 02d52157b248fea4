use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use threewc::polytope::{parse_tau, Rational};
use threewc::NodeConfig;

#[derive(Debug, Parser)]
#[command(
    name = "threewc",
    version,
    about = "DoF experiments for the intermittent MIMO three-way channel"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compare the stated DoF region with the projection of the allocation constraints.
    Region(Scenario),
    /// Exact LP sum-DoF against the closed form.
    Sumdof(Scenario),
    /// Synthesize the restricted scheme and fit DoF from an SNR sweep.
    Simulate(SimulateArgs),
    /// Block-Markov relaying for the message from node 3 to node 1.
    Adaptive(AdaptiveArgs),
    /// Sum-DoF and adaptation-gap checks over a grid of configurations.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct Scenario {
    /// Antenna counts M1,M2,M3 with M1 >= M2 >= M3 >= 1.
    #[arg(long, value_parser = parse_config)]
    pub m: NodeConfig,
    /// Availability probability of node 1 as an exact fraction p/q.
    #[arg(long, value_parser = parse_tau_arg)]
    pub tau: Rational,
    /// Directory for output files.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AllocationChoice {
    /// The sum-DoF-achieving allocation.
    Optimal,
    /// No streams at all.
    Zero,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub scenario: Scenario,
    /// SNR points in dB, comma separated.
    #[arg(long, value_parser = parse_snr_list)]
    pub snr: SnrList,
    #[arg(long, value_enum, default_value_t = AllocationChoice::Optimal)]
    pub alloc: AllocationChoice,
    /// Length of the sampled state sequence.
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Independent channel realizations to average over.
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct AdaptiveArgs {
    #[command(flatten)]
    pub scenario: Scenario,
    /// Symbols per block.
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    /// Number of blocks.
    #[arg(long = "B", default_value_t = 50)]
    pub blocks: usize,
    /// Independent runs to average over.
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Block lengths for a convergence sweep, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub sweep_n: Vec<usize>,
    /// Block counts for a convergence sweep, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub sweep_b: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Largest antenna count in the grid.
    #[arg(long, default_value_t = 4)]
    pub max: usize,
    /// Availability probabilities, comma separated fractions.
    #[arg(long, value_delimiter = ',', value_parser = parse_tau_arg, default_value = "1/4,1/2,3/4")]
    pub taus: Vec<Rational>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnrList(pub Vec<f64>);

fn parse_config(text: &str) -> Result<NodeConfig, String> {
    let parts: Vec<usize> = text
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| format!("expected three antenna counts like 3,2,1, got {text:?}"))?;
    let [m1, m2, m3] = parts[..] else {
        return Err(format!(
            "expected three antenna counts like 3,2,1, got {text:?}"
        ));
    };
    NodeConfig::new(m1, m2, m3)
        .map_err(|_| format!("requires M1 ≥ M2 ≥ M3 ≥ 1, got ({m1},{m2},{m3})"))
}

fn parse_tau_arg(text: &str) -> Result<Rational, String> {
    parse_tau(text).map_err(|e| e.to_string())
}

fn parse_snr_list(text: &str) -> Result<SnrList, String> {
    let values: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| format!("expected comma-separated SNR values in dB, got {text:?}"))?;
    if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(format!("SNR points must be finite and >= 0 dB, got {bad}"));
    }
    Ok(SnrList(values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing() {
        assert_eq!(
            parse_config("3,2,1").unwrap(),
            NodeConfig::new(3, 2, 1).unwrap()
        );
        assert!(parse_config("1,2,3")
            .unwrap_err()
            .contains("requires M1 ≥ M2 ≥ M3"));
        assert!(parse_config("3,2").is_err());
        assert!(parse_config("a,b,c").is_err());
    }

    #[test]
    fn snr_parsing() {
        assert_eq!(
            parse_snr_list("40, 50,60").unwrap(),
            SnrList(vec![40.0, 50.0, 60.0])
        );
        assert!(parse_snr_list("-3,40").is_err());
        assert!(parse_snr_list("").is_err());
    }

    #[test]
    fn tau_must_be_exact() {
        assert!(parse_tau_arg("1/2").is_ok());
        assert!(parse_tau_arg("0.5").is_err());
    }
}
