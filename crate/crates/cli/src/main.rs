use std::io::{Read, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use smartreview::fixture::{self, SeedOutcome};
use smartreview::rdf::{self, ExportOptions, RdfFormat};
use smartreview::repository::{ExportScope, Repository};
use smartreview::sparql;
use smartreview::uri::UriMapping;
use smartreview::versioning::{LineOp, VersionRef};
use smartreview::{EntityId, Provenance};

/// Name of the token-less account that CLI publishes are attributed to.
const OPERATOR: &str = "Operator (CLI)";

#[derive(Parser)]
#[command(
    name = "smartreview",
    version,
    about = "Living review articles on a scholarly knowledge graph"
)]
struct Cli {
    /// Directory holding the statement log and published versions.
    #[arg(
        long,
        global = true,
        env = "SMARTREVIEW_DATA_DIR",
        default_value = "smartreview-data"
    )]
    data_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the REST service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        /// Maximum mutating requests per account per minute; unlimited when omitted.
        #[arg(long)]
        rate_limit: Option<u32>,
    },
    /// Load the example review; does nothing if it is already present.
    SeedFixture,
    /// Run a SPARQL query from a file (or `-` for stdin) and print CSV.
    Query { file: PathBuf },
    /// Print the graph, one article, or one published version as RDF.
    ExportRdf {
        #[arg(long)]
        article: Option<String>,
        /// Published version of `--article`.
        #[arg(long, requires = "article")]
        version: Option<u64>,
        #[arg(long, default_value = "nt")]
        format: RdfFormat,
        /// Include statement authors and times.
        #[arg(long)]
        provenance: bool,
    },
    /// Add the statements of an N-Triples file (or `-` for stdin).
    ImportRdf { file: PathBuf },
    /// Write an article as a standalone HTML document.
    Render {
        article: String,
        #[arg(short, long)]
        output: PathBuf,
        /// Published version number; the working copy when omitted.
        #[arg(long)]
        version: Option<u64>,
    },
    /// Freeze the working copy of an article as a new version.
    Publish {
        article: String,
        #[arg(short = 'm', long = "message")]
        message: String,
    },
    /// Statement and text changes between two versions (`HEAD` for the working copy).
    Diff {
        article: String,
        from: VersionRef,
        to: VersionRef,
    },
}

enum Failure {
    Validation(String),
    Io(String),
}

impl From<smartreview::Error> for Failure {
    fn from(e: smartreview::Error) -> Self {
        if e.is_io() {
            Failure::Io(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// Accepts `R123` or `Resource:R123`.
fn article_id(text: &str) -> Result<EntityId, Failure> {
    if text.contains(':') {
        text.parse().map_err(Failure::Validation)
    } else {
        format!("Resource:{text}").parse().map_err(Failure::Validation)
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text)?;
        Ok(text)
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
    }
}

fn print(text: &str) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut repo = Repository::open(&cli.data_dir)?;
    let uris = UriMapping::default();
    match cli.command {
        Command::Serve { port, host, rate_limit } => {
            let addr = SocketAddr::new(host, port);
            let runtime = tokio::runtime::Runtime::new()?;
            eprintln!("listening on http://{addr}");
            runtime.block_on(smartreview_server::serve(repo, addr, rate_limit))?;
        }
        Command::SeedFixture => match fixture::seed(&mut repo.store)? {
            SeedOutcome::Created(id) => eprintln!("seeded {}", id.key),
            SeedOutcome::AlreadyPresent(id) => eprintln!("{} already present", id.key),
        },
        Command::Query { file } => {
            let text = read_input(&file)?;
            let table = sparql::query(&text, &repo.store, &uris).map_err(|e| Failure::Validation(e.to_string()))?;
            print(&sparql::to_csv(&table, &uris))?;
        }
        Command::ExportRdf {
            article,
            version,
            format,
            provenance,
        } => {
            let scope = match (article, version) {
                (None, _) => ExportScope::Full,
                (Some(a), None) => ExportScope::Article(article_id(&a)?),
                (Some(a), Some(v)) => ExportScope::Version(article_id(&a)?, v),
            };
            let options = ExportOptions {
                format,
                provenance,
                uris,
            };
            print(&repo.export(&scope, &options)?)?;
        }
        Command::ImportRdf { file } => {
            let doc = read_input(&file)?;
            let added = rdf::import_ntriples(&mut repo.store, &doc, &uris)?;
            eprintln!("imported {added} statements");
        }
        Command::Render {
            article,
            output,
            version,
        } => {
            let target = version.map_or(VersionRef::Head, VersionRef::Version);
            let rendered = repo.render(&article_id(&article)?, target)?;
            std::fs::write(&output, rendered.html).map_err(|e| Failure::Io(format!("{}: {e}", output.display())))?;
        }
        Command::Publish { article, message } => {
            let existing = repo
                .store
                .accounts()
                .find(|a| a.display_name == OPERATOR && a.token_hash.is_none())
                .map(|a| a.user_id.clone());
            let operator = match existing {
                Some(id) => id,
                None => repo.store.register_account(OPERATOR, None)?.user_id,
            };
            let v = repo.publish(&article_id(&article)?, &message, &Provenance::now(operator))?;
            println!("{}", v.version);
        }
        Command::Diff { article, from, to } => {
            let diff = repo.diff(&article_id(&article)?, from, to)?;
            let mut out = String::new();
            for t in &diff.removed {
                out.push_str(&format!("- {t}\n"));
            }
            for t in &diff.added {
                out.push_str(&format!("+ {t}\n"));
            }
            for section in &diff.text_diffs {
                out.push_str(&format!("@@ {} ({})\n", section.heading, section.section.key));
                for hunk in &section.hunks {
                    out.push_str(&format!("@ -{} +{}\n", hunk.old_start + 1, hunk.new_start + 1));
                    for line in &hunk.lines {
                        let sign = match line.op {
                            LineOp::Equal => ' ',
                            LineOp::Insert => '+',
                            LineOp::Delete => '-',
                        };
                        out.push_str(&format!("{sign}{}\n", line.text));
                    }
                }
            }
            print(&out)?;
        }
    }
    Ok(())
}
