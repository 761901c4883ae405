use std::fs;
use std::path::{Path, PathBuf};

use lexistat::analysis::{
    average_distances, averages_csv, averages_json, refcomp_csv, refcomp_json, reference_comparison,
};
use lexistat::fixtures::{load_reference_matrix, load_registry};
use lexistat::phylogeny::{calibrate, to_separation_times, upgma, Calibration, TIME_RULE};
use lexistat::wordlist::{validate_corpus, ParseOptions, WordList};
use lexistat::{build_matrix, DistanceMatrix, MatrixFormat};
use serde::Serialize;
use serde_json::json;

use crate::output::{Manifest, Sink};
use crate::{Cli, CliError, Command, FixtureAction, EXIT_VALIDATION};

/// Matrix argument naming the embedded reference table.
pub const FIXTURE_MATRIX: &str = "@fixture";

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Distances { lists_dir, output } => distances(cli, lists_dir, output.clone()),
        Command::Tree {
            matrix,
            root_year,
            collection_year,
            scale,
            output,
        } => tree(cli, matrix, *root_year, *collection_year, *scale, output.clone()),
        Command::Averages { matrix, output } => averages(cli, matrix, output.clone()),
        Command::CompareRef {
            lists_dir,
            ref1,
            ref2,
            ref1_name,
            ref2_name,
            output,
        } => compare_ref(cli, lists_dir, ref1, ref2, ref1_name, ref2_name, output.clone()),
        Command::Fixture { action } => match action {
            FixtureAction::Export { output } => fixture_export(cli, output.clone()),
            FixtureAction::Registry { output } => fixture_registry(cli, output.clone()),
        },
        Command::Validate {
            lists_dir,
            min_coverage,
            output,
        } => validate(cli, lists_dir, *min_coverage, output.clone()),
    }
}

fn pick_format<'a>(cli: &Cli, allowed: &[&'a str]) -> Result<&'a str, CliError> {
    match &cli.format {
        None => Ok(allowed[0]),
        Some(f) => {
            allowed.iter().find(|a| **a == f.as_str()).copied().ok_or_else(|| {
                CliError::validation(format!("--format must be one of {}, got {f:?}", allowed.join(", ")))
            })
        }
    }
}

fn info(cli: &Cli, msg: impl AsRef<str>) {
    if !cli.quiet {
        eprintln!("{}", msg.as_ref());
    }
}

struct LoadedLists {
    lists: Vec<WordList>,
    files: Vec<(PathBuf, Vec<u8>)>,
}

/// Parses every `.tsv` file in `dir` (sorted by file name), skipping paths
/// in `exclude`. All per-file failures are reported together.
fn load_lists(dir: &Path, opts: ParseOptions, exclude: &[&Path]) -> Result<LoadedLists, CliError> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    let mut paths = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| CliError::io(dir, e))?.path();
        let is_tsv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("tsv"));
        if is_tsv && path.is_file() && !exclude.iter().any(|x| same_file(x, &path)) {
            paths.push(path);
        }
    }
    paths.sort();

    let mut lists = Vec::new();
    let mut files = Vec::new();
    let mut problems = Vec::new();
    for path in paths {
        let bytes = fs::read(&path).map_err(|e| CliError::io(&path, e))?;
        match parse_list(&path, &bytes, opts) {
            Ok(l) => lists.push(l),
            Err(e) => problems.push(format!("{}: {e}", path.display())),
        }
        files.push((path, bytes));
    }
    if !problems.is_empty() {
        return Err(CliError {
            code: EXIT_VALIDATION,
            messages: problems,
        });
    }
    Ok(LoadedLists { lists, files })
}

fn same_file(a: &Path, b: &Path) -> bool {
    match (a.canonicalize(), b.canonicalize()) {
        (Ok(x), Ok(y)) => x == y,
        _ => a == b,
    }
}

fn parse_list(path: &Path, bytes: &[u8], opts: ParseOptions) -> lexistat::Result<WordList> {
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    WordList::parse_tsv(bytes, id, opts)
}

fn read_list(path: &Path, opts: ParseOptions) -> Result<(WordList, Vec<u8>), CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    let list = parse_list(path, &bytes, opts).map_err(|e| CliError::context(path, e))?;
    Ok((list, bytes))
}

/// Loads a matrix from a file, or the embedded table for `@fixture`. The
/// layout comes from the extension, falling back to sniffing the content.
fn load_matrix(arg: &str, manifest: &mut Manifest) -> Result<DistanceMatrix, CliError> {
    if arg == FIXTURE_MATRIX {
        let m = load_reference_matrix()?;
        manifest.input(FIXTURE_MATRIX, m.to_appendix().as_bytes());
        return Ok(m);
    }
    let path = Path::new(arg);
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    let text =
        std::str::from_utf8(&bytes).map_err(|_| CliError::validation(format!("{arg}: matrix file is not UTF-8")))?;
    let format = MatrixFormat::from_path(path).unwrap_or_else(|| sniff_format(text));
    manifest.input(arg, &bytes);
    DistanceMatrix::parse(text, format).map_err(|e| CliError::context(path, e))
}

fn sniff_format(text: &str) -> MatrixFormat {
    let first = text.trim_start();
    if first.starts_with('{') {
        MatrixFormat::Json
    } else if first.lines().next().is_some_and(|l| l.contains(',')) {
        MatrixFormat::Csv
    } else {
        MatrixFormat::Appendix
    }
}

fn distances(cli: &Cli, dir: &Path, output: Option<PathBuf>) -> Result<(), CliError> {
    let format: MatrixFormat = pick_format(cli, &["csv", "json", "appendix"])?.parse()?;
    let loaded = load_lists(dir, ParseOptions { meanings: cli.meanings }, &[])?;
    if loaded.lists.len() < 2 {
        return Err(CliError::validation(format!(
            "{}: need at least 2 word lists, found {}",
            dir.display(),
            loaded.lists.len()
        )));
    }
    let matrix = build_matrix(&loaded.lists)?;
    info(
        cli,
        format!("{} languages, {} pairs", matrix.len(), matrix.pair_count()),
    );

    let mut manifest = Manifest::new("distances");
    manifest
        .param("meanings", cli.meanings)
        .param("format", format!("{format:?}").to_lowercase());
    for (p, b) in &loaded.files {
        manifest.input(&p.display().to_string(), b);
    }
    let mut sink = Sink::new(output);
    sink.emit(matrix.write(format)?);
    sink.finish(manifest)
}

#[derive(Serialize)]
struct TreeReport {
    time_rule: &'static str,
    scale: f64,
    /// Which node the root year is pinned to.
    root_mapping: &'static str,
    tree: lexistat::phylogeny::TreeDump,
}

fn tree(
    cli: &Cli,
    matrix_arg: &str,
    root_year: i32,
    collection_year: i32,
    scale: f64,
    output: Option<PathBuf>,
) -> Result<(), CliError> {
    let format = pick_format(cli, &["newick", "json"])?;
    let calibration = Calibration::new(collection_year, root_year)?;
    let mut manifest = Manifest::new("tree");
    manifest
        .param("root_year", root_year)
        .param("collection_year", collection_year)
        .param("scale", scale)
        .param("time_rule", TIME_RULE);
    let matrix = load_matrix(matrix_arg, &mut manifest)?;
    let times = to_separation_times(&matrix, scale)?;
    let tree = upgma(times.matrix())?;
    let dated = calibrate(&tree, calibration)?;

    let newick = format!("{}\n", dated.to_newick());
    let report = TreeReport {
        time_rule: TIME_RULE,
        scale,
        root_mapping: "root of the UPGMA tree, not the deepest in-group split",
        tree: dated.dump(),
    };
    let mut json = serde_json::to_string_pretty(&report).expect("tree serializes");
    json.push('\n');

    let mut sink = Sink::new(output);
    match sink.primary().map(Path::to_path_buf) {
        Some(primary) => {
            let companion = if primary.extension().is_some_and(|e| e == "json") {
                sink.emit(json);
                (primary.with_extension("nwk"), newick)
            } else {
                sink.emit(newick);
                (primary.with_extension("json"), json)
            };
            sink.companion(companion.0, companion.1);
        }
        None if format == "json" => sink.emit(json),
        None => sink.emit(newick),
    }
    sink.finish(manifest)
}

fn averages(cli: &Cli, matrix_arg: &str, output: Option<PathBuf>) -> Result<(), CliError> {
    let format = pick_format(cli, &["csv", "json"])?;
    let mut manifest = Manifest::new("averages");
    manifest.param("format", format);
    let matrix = load_matrix(matrix_arg, &mut manifest)?;
    let report = average_distances(&matrix)?;
    let registry = load_registry();
    let text = match format {
        "json" => averages_json(&report, &registry)?,
        _ => averages_csv(&report, &registry)?,
    };
    let mut sink = Sink::new(output);
    sink.emit(text);
    sink.finish(manifest)
}

fn compare_ref(
    cli: &Cli,
    dir: &Path,
    ref1_path: &Path,
    ref2_path: &Path,
    ref1_name: &str,
    ref2_name: &str,
    output: Option<PathBuf>,
) -> Result<(), CliError> {
    let format = pick_format(cli, &["csv", "json"])?;
    let opts = ParseOptions { meanings: cli.meanings };
    let (ref1, ref1_bytes) = read_list(ref1_path, opts)?;
    let (ref2, ref2_bytes) = read_list(ref2_path, opts)?;
    let loaded = load_lists(dir, opts, &[ref1_path, ref2_path])?;
    if loaded.lists.is_empty() {
        return Err(CliError::validation(format!(
            "{}: no dialect word lists found",
            dir.display()
        )));
    }
    let rc = reference_comparison(&loaded.lists, &ref1, &ref2)?;
    for r in rc.flagged() {
        info(
            cli,
            format!("{}: distance to {ref2_name} is zero; ratio undefined", r.language_id),
        );
    }

    let mut manifest = Manifest::new("compare-ref");
    manifest
        .param("meanings", cli.meanings)
        .param("format", format)
        .param("ref1_name", ref1_name)
        .param("ref2_name", ref2_name);
    manifest.input(&ref1_path.display().to_string(), &ref1_bytes);
    manifest.input(&ref2_path.display().to_string(), &ref2_bytes);
    for (p, b) in &loaded.files {
        manifest.input(&p.display().to_string(), b);
    }
    let text = match format {
        "json" => refcomp_json(&rc, ref1_name, ref2_name, &load_registry())?,
        _ => refcomp_csv(&rc, ref1_name, ref2_name)?,
    };
    let mut sink = Sink::new(output);
    sink.emit(text);
    sink.finish(manifest)
}

fn fixture_export(cli: &Cli, output: Option<PathBuf>) -> Result<(), CliError> {
    let format: MatrixFormat = pick_format(cli, &["appendix", "csv", "json"])?.parse()?;
    let matrix = load_reference_matrix()?;
    let mut manifest = Manifest::new("fixture export");
    manifest.param("format", format!("{format:?}").to_lowercase());
    let mut sink = Sink::new(output);
    sink.emit(matrix.write(format)?);
    sink.finish(manifest)
}

fn fixture_registry(cli: &Cli, output: Option<PathBuf>) -> Result<(), CliError> {
    let format = pick_format(cli, &["csv", "json"])?;
    let registry = load_registry();
    let text = if format == "json" {
        let mut s = serde_json::to_string_pretty(registry.entries()).expect("registry serializes");
        s.push('\n');
        s
    } else {
        let mut s = String::from("index,dialect,town,region\n");
        for d in registry.entries() {
            s.push_str(&format!("{},{},{},{}\n", d.index, d.name, d.town, d.region));
        }
        s
    };
    let mut manifest = Manifest::new("fixture registry");
    manifest.param("format", format);
    let mut sink = Sink::new(output);
    sink.emit(text);
    sink.finish(manifest)
}

fn validate(cli: &Cli, dir: &Path, min_coverage: usize, output: Option<PathBuf>) -> Result<(), CliError> {
    let loaded = load_lists(dir, ParseOptions { meanings: cli.meanings }, &[])?;
    let report = validate_corpus(&loaded.lists, min_coverage).map_err(|e| CliError::context(dir, e))?;
    if !cli.quiet {
        for l in &report.languages {
            let missing = if l.missing.is_empty() {
                String::new()
            } else {
                let idx: Vec<String> = l.missing.iter().map(u32::to_string).collect();
                format!(", missing {}", idx.join(" "))
            };
            eprintln!("{}: coverage {}/{}{missing}", l.language_id, l.coverage, cli.meanings);
        }
        for w in &report.warnings {
            eprintln!("warning: {}: {}", w.language_id, w.message);
        }
    }

    let mut manifest = Manifest::new("validate");
    manifest
        .param("meanings", cli.meanings)
        .param("min_coverage", min_coverage);
    for (p, b) in &loaded.files {
        manifest.input(&p.display().to_string(), b);
    }
    let mut text = serde_json::to_string_pretty(&json!({
        "meanings": cli.meanings,
        "languages": report.languages,
        "warnings": report.warnings,
    }))
    .expect("report serializes");
    text.push('\n');
    let mut sink = Sink::new(output);
    if sink.primary().is_some() {
        sink.emit(text);
    }
    sink.finish(manifest)
}
