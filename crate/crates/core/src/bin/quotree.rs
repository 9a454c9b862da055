use std::io::{self, Read};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use quotree::analysis::classify;
use quotree::corpus::{load_corpus, run_corpus};
use quotree::grammar::{load_grammar, Grammar, SHIPPED_GRAMMAR, SHIPPED_LEXICON};
use quotree::parser::parse_text;
use quotree::tokenizer::{
    detokenize, normalize_with_report, pair_quotes, tokenize, TranspositionReport,
};

#[derive(Parser)]
#[command(
    name = "quotree",
    version,
    about = "Parse and classify quoted speech with a lexicalized TAG"
)]
struct Cli {
    /// Grammar file to use instead of the built-in one.
    #[arg(long, global = true, value_name = "PATH")]
    grammar: Option<PathBuf>,
    /// Lexicon file to use instead of the built-in one.
    #[arg(long, global = true, value_name = "PATH")]
    lexicon: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Records,
}

#[derive(Subcommand)]
enum Command {
    /// Tokenize and move commas and periods out of closing quotes.
    Normalize {
        /// Input file; standard input when absent.
        file: Option<PathBuf>,
        /// Print transposition counts to standard error.
        #[arg(long)]
        report: bool,
    },
    /// Print every derivation of a sentence.
    Parse { sentence: String },
    /// Print the quoted-speech analysis of every derivation.
    Classify { sentence: String },
    /// Run a regression corpus file.
    Corpus { file: PathBuf },
    /// Print the loaded grammar in canonical form.
    DumpGrammar,
}

fn read(path: &PathBuf) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {}", path.display(), e))
}

fn grammar(cli: &Cli) -> Result<Grammar, String> {
    if cli.grammar.is_none() && cli.lexicon.is_none() {
        return Ok(Grammar::shipped());
    }
    let g = match &cli.grammar {
        Some(p) => read(p)?,
        None => SHIPPED_GRAMMAR.to_string(),
    };
    let l = match &cli.lexicon {
        Some(p) => read(p)?,
        None => SHIPPED_LEXICON.to_string(),
    };
    load_grammar(&g, &l).map_err(|e| e.to_string())
}

fn normalize(file: &Option<PathBuf>, report: bool) -> Result<bool, String> {
    let text = match file {
        Some(p) => read(p)?,
        None => {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| e.to_string())?;
            s
        }
    };
    let mut total = TranspositionReport::default();
    let mut ok = true;
    for (i, line) in text.lines().enumerate() {
        let tokens = tokenize(line);
        if let Err(e) = pair_quotes(&tokens) {
            eprintln!("line {}: {}", i + 1, e);
            ok = false;
        }
        let (out, r) = normalize_with_report(&tokens);
        total.commas += r.commas;
        total.periods += r.periods;
        println!("{}", detokenize(&out));
    }
    if report {
        eprintln!(
            "transposed commas={} periods={}",
            total.commas, total.periods
        );
    }
    Ok(ok)
}

fn run(cli: &Cli) -> Result<bool, String> {
    match &cli.command {
        Command::Normalize { file, report } => normalize(file, *report),
        Command::Parse { sentence } => {
            let g = grammar(cli)?;
            let forest = parse_text(sentence, &g).map_err(|e| e.to_string())?;
            for (i, d) in forest.iter().enumerate() {
                match cli.format {
                    Format::Records => println!("derivation={}", d.render(&g)),
                    Format::Plain => {
                        let tree = d
                            .replay(&g)
                            .map(|t| t.bracketed())
                            .map_err(|e| e.to_string())?;
                        println!("#{} {}\n   {}", i + 1, d.render(&g), tree);
                    }
                }
            }
            if forest.is_empty() {
                eprintln!("no parse");
            }
            Ok(!forest.is_empty())
        }
        Command::Classify { sentence } => {
            let g = grammar(cli)?;
            let forest = parse_text(sentence, &g).map_err(|e| e.to_string())?;
            for (i, d) in forest.iter().enumerate() {
                let line =
                    classify(d, &g).map_or("construction=none".to_string(), |a| a.to_string());
                match cli.format {
                    Format::Records => println!("{}", line),
                    Format::Plain => println!("#{} {}\n   {}", i + 1, d.render(&g), line),
                }
            }
            if forest.is_empty() {
                eprintln!("no parse");
            }
            Ok(!forest.is_empty())
        }
        Command::Corpus { file } => {
            let g = grammar(cli)?;
            let cases =
                load_corpus(&read(file)?).map_err(|e| format!("{}: {}", file.display(), e))?;
            let report = run_corpus(&cases, &g);
            match cli.format {
                Format::Plain => println!("{}", report),
                Format::Records => {
                    for r in &report.results {
                        let result = if r.passed { "pass" } else { "fail" };
                        println!(
                            "id={} result={} derivations={}",
                            r.id, result, r.derivations
                        );
                    }
                    let word = if report.all_passed() { "PASS" } else { "FAIL" };
                    println!("{} {}/{}", word, report.passed(), report.total());
                }
            }
            Ok(report.all_passed())
        }
        Command::DumpGrammar => {
            let g = grammar(cli)?;
            print!("{}", g.dump());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(1)
        }
    }
}
