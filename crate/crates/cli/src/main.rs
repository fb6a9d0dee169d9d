//! Command-line front end: pairwise divergences, trivergences, pairwise
//! matrices, and variant enumeration over text documents or TSV count files.
//!
//! Exit codes: 0 success, 1 usage, 2 I/O, 3 empty or invalid distribution.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use triverge::ingest::{self, TokenizerConfig};
use triverge::{
    enumerate_variants, evaluate_variant, triv_compound_js_with, triv_compound_kl, triv_product,
    CountDistribution, DivergenceKind, Error as CoreError, JsCompoundNormalizer, NormalizationMode,
    SmoothingContext, TrivergenceForm, TrivergenceResult,
};

use output::{MatrixReport, VariantEvaluation, VariantRow};

#[derive(Parser)]
#[command(
    name = "triverge",
    version,
    about = "Smoothed KL/JS divergences and trivergences over count distributions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Divergence between two inputs
    Div {
        #[arg(long, value_enum)]
        base: BaseArg,
        #[command(flatten)]
        common: CommonArgs,
        /// Exactly two input files
        #[arg(num_args = 2, required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Trivergence over three inputs
    Triv {
        #[arg(long, value_enum)]
        form: FormArg,
        #[arg(long, value_enum)]
        base: BaseArg,
        /// Inner normalizer for the compound JS form
        #[arg(long, value_enum, default_value_t = QrNormalizerArg::Union)]
        qr_normalizer: QrNormalizerArg,
        #[command(flatten)]
        common: CommonArgs,
        /// Exactly three input files
        #[arg(num_args = 3, required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Full pairwise matrix over two or more inputs
    Matrix {
        #[arg(long, value_enum)]
        base: BaseArg,
        #[arg(long, value_enum, default_value_t = OutputArg::Csv)]
        output: OutputArg,
        #[command(flatten)]
        common: CommonArgs,
        /// Two or more input files
        #[arg(num_args = 1.., required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Enumerate the listed compositions, optionally evaluating them
    Variants {
        #[arg(long, value_enum)]
        form: FormArg,
        /// Evaluate the evaluable compositions over three inputs
        #[arg(long)]
        evaluate: bool,
        #[arg(long, value_enum)]
        base: Option<BaseArg>,
        #[command(flatten)]
        common: CommonArgs,
        /// Three input files (with --evaluate)
        #[arg(num_args = 0..)]
        inputs: Vec<PathBuf>,
    },
}

#[derive(Args)]
struct CommonArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::PaperLiteral)]
    mode: ModeArg,
    /// Smoothing denominator: auto, pair-sum, triplet-union, or a positive integer
    #[arg(long, default_value = "auto", value_parser = parse_denom)]
    denom: DenomArg,
    #[arg(long, value_enum, default_value_t = InputKindArg::Text)]
    input_kind: InputKindArg,
    /// n-gram order for text inputs
    #[arg(long, default_value_t = 1)]
    ngram: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaseArg {
    Kl,
    Js,
}

impl From<BaseArg> for DivergenceKind {
    fn from(base: BaseArg) -> Self {
        match base {
            BaseArg::Kl => DivergenceKind::Kl,
            BaseArg::Js => DivergenceKind::Js,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormArg {
    Product,
    Compound,
}

impl From<FormArg> for TrivergenceForm {
    fn from(form: FormArg) -> Self {
        match form {
            FormArg::Product => TrivergenceForm::Product,
            FormArg::Compound => TrivergenceForm::Compound,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    PaperLiteral,
    Token,
    Strict,
}

impl From<ModeArg> for NormalizationMode {
    fn from(mode: ModeArg) -> Self {
        match mode {
            ModeArg::PaperLiteral => NormalizationMode::PaperLiteral,
            ModeArg::Token => NormalizationMode::TokenNormalized,
            ModeArg::Strict => NormalizationMode::Strict,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum QrNormalizerArg {
    Union,
    DistinctSum,
}

impl From<QrNormalizerArg> for JsCompoundNormalizer {
    fn from(arg: QrNormalizerArg) -> Self {
        match arg {
            QrNormalizerArg::Union => JsCompoundNormalizer::UnionCardinality,
            QrNormalizerArg::DistinctSum => JsCompoundNormalizer::DistinctSum,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum InputKindArg {
    Text,
    Tsv,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum DenomArg {
    Auto,
    PairSum,
    TripletUnion,
    Explicit(u64),
}

fn parse_denom(s: &str) -> Result<DenomArg, String> {
    match s {
        "auto" => Ok(DenomArg::Auto),
        "pair-sum" => Ok(DenomArg::PairSum),
        "triplet-union" => Ok(DenomArg::TripletUnion),
        _ => match s.parse::<u64>() {
            Ok(n) if n >= 1 => Ok(DenomArg::Explicit(n)),
            _ => Err(format!(
                "expected auto, pair-sum, triplet-union, or a positive integer, got {s:?}"
            )),
        },
    }
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }

    fn io(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    fn data(message: impl Into<String>) -> Self {
        CliError {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        match err {
            CoreError::Encoding { .. } => CliError::io(err.to_string()),
            _ => CliError::data(err.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) {
                let _ = err.print();
                return ExitCode::SUCCESS;
            }
            let _ = err.print();
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(rendered) => {
            println!("{rendered}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}

fn run(command: Command) -> Result<String, CliError> {
    let digits = output::printed_digits();
    match command {
        Command::Div {
            base,
            common,
            inputs,
        } => {
            let p = load(&inputs[0], &common)?;
            let q = load(&inputs[1], &common)?;
            let ctx = pair_context(&common, &p, &q)?;
            let report = triverge::pairwise(base.into(), &p, &q, &ctx)?;
            Ok(output::json_to_string(&output::div_report(&report), digits))
        }
        Command::Triv {
            form,
            base,
            qr_normalizer,
            common,
            inputs,
        } => {
            let mode = common.mode.into();
            triplet_denom_check(&common)?;
            let p = load(&inputs[0], &common)?;
            let q = load(&inputs[1], &common)?;
            let r = load(&inputs[2], &common)?;
            let labels = [
                p.label().to_string(),
                q.label().to_string(),
                r.label().to_string(),
            ];
            let result: TrivergenceResult = match (form, base) {
                (FormArg::Product, _) => triv_product(&p, &q, &r, base.into(), mode)?,
                (FormArg::Compound, BaseArg::Kl) => triv_compound_kl(&p, &q, &r, mode)?,
                (FormArg::Compound, BaseArg::Js) => {
                    triv_compound_js_with(&p, &q, &r, mode, qr_normalizer.into())?
                }
            };
            Ok(output::json_to_string(
                &output::triv_report(&result, &labels),
                digits,
            ))
        }
        Command::Matrix {
            base,
            output: output_kind,
            common,
            inputs,
        } => {
            if inputs.len() < 2 {
                return Err(CliError::usage("matrix requires at least 2 inputs"));
            }
            let distributions: Vec<CountDistribution> = inputs
                .iter()
                .map(|path| load(path, &common))
                .collect::<Result<_, _>>()?;
            let report = matrix(base, &common, &distributions)?;
            match output_kind {
                OutputArg::Json => Ok(output::json_to_string(
                    &output::matrix_report_json(&report),
                    digits,
                )),
                OutputArg::Csv => Ok(output::matrix_csv(&report, digits).trim_end().to_string()),
            }
        }
        Command::Variants {
            form,
            evaluate,
            base,
            common,
            inputs,
        } => {
            let descriptors = enumerate_variants(form.into());
            let mut rows: Vec<VariantRow> = descriptors
                .iter()
                .map(|v| VariantRow {
                    index: v.index,
                    notation: v.notation.clone(),
                    evaluable: v.evaluable,
                    evaluation: None,
                })
                .collect();
            if evaluate {
                let base = base.ok_or_else(|| CliError::usage("--evaluate requires --base"))?;
                if inputs.len() != 3 {
                    return Err(CliError::usage("--evaluate requires exactly 3 inputs"));
                }
                triplet_denom_check(&common)?;
                let p = load(&inputs[0], &common)?;
                let q = load(&inputs[1], &common)?;
                let r = load(&inputs[2], &common)?;
                for (descriptor, row) in descriptors.iter().zip(&mut rows) {
                    row.evaluation = Some(if descriptor.evaluable {
                        let result = evaluate_variant(
                            descriptor,
                            &p,
                            &q,
                            &r,
                            base.into(),
                            common.mode.into(),
                        )?;
                        VariantEvaluation::Value {
                            value: result.value,
                            units: result.units(),
                            zero_branch: result.zero_branch,
                        }
                    } else {
                        VariantEvaluation::NotEvaluable
                    });
                }
            } else if !inputs.is_empty() {
                return Err(CliError::usage("inputs are only accepted with --evaluate"));
            }
            let form_str = TrivergenceForm::from(form).as_str();
            Ok(output::json_to_string(
                &output::variants_report(form_str, &rows),
                digits,
            ))
        }
    }
}

fn load(path: &Path, common: &CommonArgs) -> Result<CountDistribution, CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    let text =
        ingest::decode_utf8(bytes).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    let label = path.display().to_string();
    let distribution = match common.input_kind {
        InputKindArg::Text => {
            let cfg = TokenizerConfig::with_ngram(common.ngram);
            ingest::distribution_from_text(&text, &cfg, label)
        }
        InputKindArg::Tsv => ingest::distribution_from_tsv(&text, label),
    };
    distribution.map_err(|e| CliError {
        code: 3,
        message: format!("{}: {e}", path.display()),
    })
}

fn pair_context(
    common: &CommonArgs,
    p: &CountDistribution,
    q: &CountDistribution,
) -> Result<SmoothingContext, CliError> {
    let mode = common.mode.into();
    match common.denom {
        DenomArg::Auto | DenomArg::PairSum => Ok(SmoothingContext::pair_sum(mode, p, q)),
        DenomArg::TripletUnion => Err(CliError::usage(
            "--denom triplet-union requires three inputs; use triv",
        )),
        DenomArg::Explicit(n) => {
            Ok(SmoothingContext::explicit(mode, n).map_err(|e| CliError::usage(e.to_string()))?)
        }
    }
}

/// Trivergence evaluation always uses the triplet-union denominator; reject
/// contexts it cannot honor.
fn triplet_denom_check(common: &CommonArgs) -> Result<(), CliError> {
    match common.denom {
        DenomArg::Auto | DenomArg::TripletUnion => Ok(()),
        DenomArg::PairSum | DenomArg::Explicit(_) => Err(CliError::usage(
            "trivergence uses the triplet-union denominator; pass --denom auto or triplet-union",
        )),
    }
}

fn matrix(
    base: BaseArg,
    common: &CommonArgs,
    distributions: &[CountDistribution],
) -> Result<MatrixReport, CliError> {
    let kind: DivergenceKind = base.into();
    let mode: NormalizationMode = common.mode.into();
    let n = distributions.len();
    let (policy, shared_denominator): (&'static str, Option<u64>) = match common.denom {
        DenomArg::Auto | DenomArg::PairSum => ("pair-sum", None),
        DenomArg::Explicit(v) => ("explicit", Some(v)),
        DenomArg::TripletUnion => {
            return Err(CliError::usage(
                "--denom triplet-union is not defined for pairwise matrices",
            ))
        }
    };

    let mut values = vec![vec![0.0f64; n]; n];
    for (i, di) in distributions.iter().enumerate() {
        for (j, dj) in distributions.iter().enumerate() {
            let ctx = match shared_denominator {
                Some(v) => SmoothingContext::explicit(mode, v)
                    .map_err(|e| CliError::usage(e.to_string()))?,
                None => SmoothingContext::pair_sum(mode, di, dj),
            };
            values[i][j] = triverge::pairwise(kind, di, dj, &ctx)?.value;
        }
    }

    if kind == DivergenceKind::Js {
        for i in 0..n {
            for j in 0..i {
                assert_eq!(
                    values[i][j].to_bits(),
                    values[j][i].to_bits(),
                    "JS matrix symmetry violated between {} and {}",
                    distributions[i].label(),
                    distributions[j].label()
                );
            }
        }
    }

    Ok(MatrixReport {
        base: kind.as_str(),
        mode: mode.as_str(),
        denominator_policy: policy,
        denominator_value: shared_denominator,
        labels: distributions
            .iter()
            .map(|d| d.label().to_string())
            .collect(),
        values,
    })
}
