use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Graph, GraphCollection};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetFormat {
    /// `DS_A.txt`, `DS_graph_indicator.txt`, `DS_graph_labels.txt`.
    BenchmarkCollection,
    /// One `u v [w]` file per graph plus `labels.txt`.
    EdgeListDir,
}

impl std::str::FromStr for DatasetFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "benchmark-collection" | "benchmark" | "tu" => Ok(DatasetFormat::BenchmarkCollection),
            "edge-list-dir" | "edge-list" => Ok(DatasetFormat::EdgeListDir),
            other => Err(Error::Invalid(format!("unknown dataset format {other:?}"))),
        }
    }
}

pub fn load_collection(path: &Path, format: DatasetFormat) -> Result<GraphCollection> {
    if !path.is_dir() {
        return Err(Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "dataset directory not found"),
        ));
    }
    let collection = match format {
        DatasetFormat::BenchmarkCollection => load_benchmark(path)?,
        DatasetFormat::EdgeListDir => load_edge_list_dir(path)?,
    };
    let loops = collection.self_loops_stripped();
    if loops > 0 {
        log::warn!("{}: stripped {loops} self-loops", collection.name);
    }
    let isolated: usize = collection.graphs.iter().map(|g| g.isolated_nodes().len()).sum();
    if isolated > 0 {
        log::warn!(
            "{}: {isolated} isolated nodes (never used as walk starts)",
            collection.name
        );
    }
    Ok(collection)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn fields(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|f| !f.is_empty())
}

fn parse_field<T: std::str::FromStr>(path: &Path, line: usize, field: Option<&str>) -> Result<T> {
    let f = field.ok_or_else(|| Error::parse(path, line, "missing field"))?;
    f.parse()
        .map_err(|_| Error::parse(path, line, format!("cannot parse {f:?}")))
}

fn benchmark_file(dir: &Path, stem: &str, suffix: &str) -> Result<PathBuf> {
    let direct = dir.join(format!("{stem}_{suffix}"));
    if direct.is_file() {
        return Ok(direct);
    }
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    for entry in entries {
        let p = entry.map_err(|e| Error::io(dir, e))?.path();
        if p.file_name()
            .and_then(|n| n.to_str())
            .is_some_and(|n| n.ends_with(&format!("_{suffix}")))
        {
            return Ok(p);
        }
    }
    Err(Error::io(
        direct,
        std::io::Error::new(std::io::ErrorKind::NotFound, "missing benchmark file"),
    ))
}

fn load_benchmark(dir: &Path) -> Result<GraphCollection> {
    let stem = dir
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or("dataset")
        .to_string();
    let a_path = benchmark_file(dir, &stem, "A.txt")?;
    let ind_path = benchmark_file(dir, &stem, "graph_indicator.txt")?;
    let lab_path = benchmark_file(dir, &stem, "graph_labels.txt")?;

    let indicator_text = read(&ind_path)?;
    let mut indicator = Vec::new();
    for (line, text) in data_lines(&indicator_text) {
        let g: usize = parse_field(&ind_path, line, fields(text).next())?;
        if g == 0 {
            return Err(Error::parse(&ind_path, line, "graph ids are 1-based"));
        }
        indicator.push(g - 1);
    }

    let labels_text = read(&lab_path)?;
    let raw_labels: Vec<String> = data_lines(&labels_text).map(|(_, l)| l.to_string()).collect();
    let graph_count = raw_labels.len();

    // Local ids follow global node order inside each graph.
    let mut node_counts = vec![0usize; graph_count];
    let mut local = Vec::with_capacity(indicator.len());
    for (k, &g) in indicator.iter().enumerate() {
        if g >= graph_count {
            return Err(Error::parse(
                &ind_path,
                k + 1,
                format!("graph id {} but only {graph_count} labels", g + 1),
            ));
        }
        local.push(node_counts[g]);
        node_counts[g] += 1;
    }
    if let Some(g) = node_counts.iter().position(|&c| c == 0) {
        return Err(Error::Invalid(format!("graph {} has zero nodes", g + 1)));
    }

    let a_text = read(&a_path)?;
    let mut edges: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); graph_count];
    for (line, text) in data_lines(&a_text) {
        let mut it = fields(text);
        let i: usize = parse_field(&a_path, line, it.next())?;
        let j: usize = parse_field(&a_path, line, it.next())?;
        for id in [i, j] {
            if id == 0 || id > indicator.len() {
                return Err(Error::parse(
                    &a_path,
                    line,
                    format!("node id {id} outside 1..={}", indicator.len()),
                ));
            }
        }
        let (gi, gj) = (indicator[i - 1], indicator[j - 1]);
        if gi != gj {
            return Err(Error::parse(
                &a_path,
                line,
                format!("edge joins graphs {} and {}", gi + 1, gj + 1),
            ));
        }
        edges[gi].push((local[i - 1], local[j - 1], 1.0));
    }

    let graphs = edges
        .into_iter()
        .zip(&node_counts)
        .map(|(e, &n)| Graph::from_edges(n, false, e))
        .collect::<Result<Vec<_>>>()?;
    GraphCollection::new(stem, graphs, &raw_labels)
}

fn load_edge_list_dir(dir: &Path) -> Result<GraphCollection> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let p = entry.map_err(|e| Error::io(dir, e))?.path();
        let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("");
        if p.is_file() && name != "labels.txt" && !name.starts_with('.') {
            files.push(p);
        }
    }
    files.sort();

    let labels_path = dir.join("labels.txt");
    let labels_text = read(&labels_path)?;
    let raw_labels: Vec<String> = data_lines(&labels_text).map(|(_, l)| l.to_string()).collect();
    if raw_labels.len() != files.len() {
        return Err(Error::Invalid(format!(
            "{} has {} labels for {} graph files",
            labels_path.display(),
            raw_labels.len(),
            files.len()
        )));
    }

    let graphs = files
        .iter()
        .map(|p| parse_edge_list(p))
        .collect::<Result<Vec<_>>>()?;
    let name = dir
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or("dataset")
        .to_string();
    GraphCollection::new(name, graphs, &raw_labels)
}

/// Parse one edge-list file. Lines are `u v [w]` with 0-based ids;
/// `# nodes: N` declares the node count and `# directed` marks the graph
/// directed. Other `#` lines are comments.
fn parse_edge_list(path: &Path) -> Result<Graph> {
    let text = read(path)?;
    let mut declared: Option<usize> = None;
    let mut directed = false;
    let mut edges = Vec::new();
    for (line, l) in data_lines(&text) {
        if let Some(directive) = l.strip_prefix('#') {
            let directive = directive.trim();
            if let Some(n) = directive.strip_prefix("nodes:") {
                declared = Some(parse_field(path, line, Some(n.trim()))?);
            } else if directive == "directed" {
                directed = true;
            }
            continue;
        }
        let mut it = fields(l);
        let u: usize = parse_field(path, line, it.next())?;
        let v: usize = parse_field(path, line, it.next())?;
        let w: f64 = match it.next() {
            Some(f) => parse_field(path, line, Some(f))?,
            None => 1.0,
        };
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::parse(path, line, format!("weight {w} is not positive")));
        }
        if let Some(n) = declared {
            if u >= n || v >= n {
                return Err(Error::parse(
                    path,
                    line,
                    format!("node id {} beyond declared count {n}", u.max(v)),
                ));
            }
        }
        edges.push((u, v, w));
    }
    let node_count =
        declared.unwrap_or_else(|| edges.iter().map(|&(u, v, _)| u.max(v) + 1).max().unwrap_or(0));
    if node_count == 0 {
        return Err(Error::Invalid(format!(
            "{}: graph with zero nodes",
            path.display()
        )));
    }
    Graph::from_edges(node_count, directed, edges)
}

/// Write a collection in edge-list-dir format. Reloading it gives back
/// the same graphs and labels.
pub fn save_edge_list_dir(collection: &GraphCollection, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let width = collection.len().to_string().len().max(4);
    for (i, g) in collection.graphs.iter().enumerate() {
        let p = dir.join(format!("graph_{i:0width$}.txt"));
        let mut out = String::new();
        out.push_str(&format!("# nodes: {}\n", g.node_count()));
        if g.is_directed() {
            out.push_str("# directed\n");
        }
        for a in g.edges() {
            out.push_str(&format!("{} {} {:?}\n", a.source, a.target, a.weight));
        }
        fs::write(&p, out).map_err(|e| Error::io(&p, e))?;
    }
    let p = dir.join("labels.txt");
    let mut f = fs::File::create(&p).map_err(|e| Error::io(&p, e))?;
    for &l in &collection.labels {
        writeln!(f, "{}", collection.class_names[l]).map_err(|e| Error::io(&p, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, text: &str) {
        fs::write(dir.join(name), text).unwrap();
    }

    fn two_graph_benchmark(dir: &Path) {
        // graph 1: triangle on nodes 1..3, graph 2: single edge 4-5
        write(dir, "TOY_A.txt", "1, 2\n2, 3\n3, 1\n2, 1\n4, 5\n5, 4\n");
        write(dir, "TOY_graph_indicator.txt", "1\n1\n1\n2\n2\n");
        write(dir, "TOY_graph_labels.txt", "0\n1\n");
        write(dir, "TOY_node_labels.txt", "3\n3\n1\n2\n2\n");
    }

    #[test]
    fn loads_benchmark_collection() {
        let tmp = tempfile::tempdir().unwrap();
        let dir = tmp.path().join("TOY");
        fs::create_dir(&dir).unwrap();
        two_graph_benchmark(&dir);
        let c = load_collection(&dir, DatasetFormat::BenchmarkCollection).unwrap();
        assert_eq!(c.name, "TOY");
        let counts: Vec<usize> = c.graphs.iter().map(Graph::node_count).collect();
        assert_eq!(counts, vec![3, 2]);
        assert_eq!(c.labels, vec![0, 1]);
        assert_eq!(c.graphs[0].edge_count(), 3);
        assert_eq!(c.graphs[1].edge_count(), 1);
    }

    #[test]
    fn benchmark_dangling_node_names_line() {
        let tmp = tempfile::tempdir().unwrap();
        let dir = tmp.path().join("BAD");
        fs::create_dir(&dir).unwrap();
        write(&dir, "BAD_A.txt", "1, 2\n2, 9\n");
        write(&dir, "BAD_graph_indicator.txt", "1\n1\n");
        write(&dir, "BAD_graph_labels.txt", "0\n");
        let err = load_collection(&dir, DatasetFormat::BenchmarkCollection).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn benchmark_graph_without_nodes_is_an_error() {
        let tmp = tempfile::tempdir().unwrap();
        let dir = tmp.path().join("E");
        fs::create_dir(&dir).unwrap();
        write(&dir, "E_A.txt", "1, 2\n");
        write(&dir, "E_graph_indicator.txt", "1\n1\n");
        write(&dir, "E_graph_labels.txt", "0\n1\n");
        assert!(load_collection(&dir, DatasetFormat::BenchmarkCollection).is_err());
    }

    #[test]
    fn edge_list_beyond_declared_count_names_line() {
        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "g0.txt", "# nodes: 3\n0 1\n1 2\n2 3\n");
        write(tmp.path(), "labels.txt", "0\n");
        let err = load_collection(tmp.path(), DatasetFormat::EdgeListDir).unwrap_err();
        match err {
            Error::Parse { line, msg, .. } => {
                assert_eq!(line, 4);
                assert!(msg.contains("beyond declared count"));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn edge_list_malformed_line() {
        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "g0.txt", "0 1\n1 x\n");
        write(tmp.path(), "labels.txt", "0\n");
        let err = load_collection(tmp.path(), DatasetFormat::EdgeListDir).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn edge_list_weights_and_self_loops() {
        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "a.txt", "0 1 2.5\n1 1\n1 2\n");
        write(tmp.path(), "b.txt", "# directed\n0 1\n");
        write(tmp.path(), "labels.txt", "x\ny\n");
        let c = load_collection(tmp.path(), DatasetFormat::EdgeListDir).unwrap();
        assert_eq!(c.self_loops_stripped(), 1);
        assert_eq!(c.graphs[0].arcs()[0].weight, 2.5);
        assert!(c.graphs[1].is_directed());
        assert_eq!(c.labels, vec![0, 1]);
    }

    #[test]
    fn missing_directory_is_an_error() {
        let err = load_collection(Path::new("/nonexistent/awe"), DatasetFormat::EdgeListDir);
        assert!(err.is_err());
    }
}
