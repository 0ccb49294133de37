use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use craql::ast::serialize_project;
use craql::runner::{collate_csv, generate_props, load_project, run_batch, RunConfig};

/// Run CRAQL query lists over project lists.
#[derive(Parser, Debug)]
#[command(name = "craql", version)]
struct Cli {
    /// File listing project names, one per line.
    #[arg(short = 'P', value_name = "PROJECTLIST")]
    projects: Option<PathBuf>,
    /// File listing query files, one per line.
    #[arg(short = 'Q', value_name = "QUERYLIST")]
    queries: Option<PathBuf>,
    /// Root holding projects/, queries/, properties/ and results/.
    #[arg(long, global = true, default_value = ".")]
    dirs: PathBuf,
    /// Projects evaluated concurrently.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Maximum callquery nesting.
    #[arg(long, default_value_t = craql::engine::DEFAULT_RECURSION_LIMIT)]
    recursion_limit: usize,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Merge every results/*.vars into results/craql_output.csv.
    Collate,
    /// Write properties/<project>.properties from properties/projecttags.csv.
    Genprops,
    /// Print a project's parsed and bound AST in the serialized format.
    ExportAst {
        /// Project name under projects/.
        project: String,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let root = cli.dirs.clone();
    if cli.command.is_some() && (cli.projects.is_some() || cli.queries.is_some()) {
        eprintln!("error: -P and -Q cannot be combined with a subcommand");
        return ExitCode::from(2);
    }
    let result = match cli.command {
        Some(Command::Collate) => collate_csv(&root.join("results")).map(|p| {
            println!("{}", p.display());
            0
        }),
        Some(Command::Genprops) => generate_props(&root.join("properties")).map(|files| {
            println!("wrote {} properties files", files.len());
            0
        }),
        Some(Command::ExportAst { project }) => {
            match load_project(&project, &root.join("projects").join(&project)) {
                Ok(p) => {
                    print!("{}", serialize_project(&p.ast));
                    Ok(0)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    Ok(1)
                }
            }
        }
        None => {
            let (Some(p), Some(q)) = (cli.projects, cli.queries) else {
                eprintln!("error: -P <PROJECTLIST> and -Q <QUERYLIST> are required");
                return ExitCode::from(2);
            };
            let mut config = RunConfig::new(root, p, q);
            config.jobs = cli.jobs;
            config.recursion_limit = cli.recursion_limit;
            run_batch(&config).map(|report| {
                for r in &report.records {
                    let status = if r.aborted { "FAILED" } else { "ok" };
                    let rows: usize = r.row_counts.iter().map(|(_, n)| n).sum();
                    println!(
                        "{}\t{status}\tfiles={}\trows={rows}\tvisited={}",
                        r.project, r.stats.files_parsed, r.stats.nodes_visited
                    );
                }
                report.exit_code()
            })
        }
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
