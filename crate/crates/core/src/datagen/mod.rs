//! CSV ingestion/serialisation and the synthetic graph generator.
//!
//! A dataset is a directory with three headed CSV files:
//!
//! * `nodes.csv`: `node_id,lat,lon`
//! * `footpaths.csv`: `from_id,to_id,duration_s` (walking seconds at 1 m/s,
//!   i.e. the distance in metres)
//! * `connections.csv`: `from_id,to_id,dep_s,arr_s,trip_label`

mod synth;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub use synth::{generate_synthetic, SynthParams, Template};

use crate::model::{Connection, EdgeAtf, NodeId, TransportGraph};
use crate::time::{Duration, TimePoint, MAX_INPUT_SECS};
use crate::{Error, Result};

pub const NODES_FILE: &str = "nodes.csv";
pub const FOOTPATHS_FILE: &str = "footpaths.csv";
pub const CONNECTIONS_FILE: &str = "connections.csv";

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct LoadOptions {
    /// Footpaths longer than this are dropped.
    pub walk_limit_m: f64,
    pub walk_speed_mps: f64,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            walk_limit_m: 600.0,
            walk_speed_mps: 1.0,
        }
    }
}

struct Rows {
    path: PathBuf,
    reader: csv::Reader<fs::File>,
}

impl Rows {
    fn open(path: PathBuf) -> Result<Rows> {
        let reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_path(&path)?;
        Ok(Rows { path, reader })
    }

    /// Calls `f` on each record with a helper for typed field access.
    fn each(mut self, arity: usize, mut f: impl FnMut(&Field<'_>) -> Result<()>) -> Result<()> {
        for rec in self.reader.records() {
            let rec = rec.map_err(|e| Error::Parse {
                path: self.path.clone(),
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })?;
            let line = rec.position().map_or(0, |p| p.line());
            let field = Field {
                path: &self.path,
                line,
                rec: &rec,
            };
            if rec.len() != arity {
                return Err(field.error(format!("expected {arity} fields, found {}", rec.len())));
            }
            f(&field)?;
        }
        Ok(())
    }
}

struct Field<'a> {
    path: &'a Path,
    line: u64,
    rec: &'a csv::StringRecord,
}

impl Field<'_> {
    fn error(&self, message: String) -> Error {
        Error::Parse {
            path: self.path.to_path_buf(),
            line: self.line,
            message,
        }
    }

    fn str(&self, i: usize) -> &str {
        &self.rec[i]
    }

    fn parse<T: std::str::FromStr>(&self, i: usize, what: &str) -> Result<T> {
        self.rec[i]
            .parse()
            .map_err(|_| self.error(format!("invalid {what} `{}`", &self.rec[i])))
    }

    fn node(&self, g: &TransportGraph, i: usize) -> Result<NodeId> {
        g.node(self.str(i))
            .ok_or_else(|| self.error(format!("unknown node `{}`", self.str(i))))
    }

    fn secs(&self, i: usize, what: &str) -> Result<u32> {
        let v: u64 = self.parse(i, what)?;
        if v >= MAX_INPUT_SECS as u64 {
            return Err(self.error(format!("{what} {v} out of range")));
        }
        Ok(v as u32)
    }
}

/// Loads a dataset directory into a validated graph. Footpaths and
/// timetables on the same pair of nodes are merged into one edge.
pub fn load_dataset(dir: &Path, opts: LoadOptions) -> Result<TransportGraph> {
    if !(opts.walk_speed_mps > 0.0 && opts.walk_speed_mps.is_finite()) || opts.walk_limit_m.is_nan()
    {
        return Err(Error::InvalidParameters(
            "walk speed must be positive and finite".into(),
        ));
    }
    let mut g = TransportGraph::new();
    Rows::open(dir.join(NODES_FILE))?.each(3, |f| {
        let lat: f64 = f.parse(1, "latitude")?;
        let lon: f64 = f.parse(2, "longitude")?;
        if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lon) {
            return Err(f.error(format!("coordinates ({lat}, {lon}) out of range")));
        }
        g.add_node(f.str(0), lat, lon)
            .map_err(|e| f.error(e.to_string()))?;
        Ok(())
    })?;

    let mut walks: BTreeMap<(NodeId, NodeId), Duration> = BTreeMap::new();
    Rows::open(dir.join(FOOTPATHS_FILE))?.each(3, |f| {
        let from = f.node(&g, 0)?;
        let to = f.node(&g, 1)?;
        let distance = f.secs(2, "duration")? as f64;
        if distance > opts.walk_limit_m {
            return Ok(());
        }
        let secs = (distance / opts.walk_speed_mps).ceil();
        if secs >= MAX_INPUT_SECS as f64 {
            return Err(f.error("walking time out of range".into()));
        }
        let d = Duration::new(secs as u32);
        let slot = walks.entry((from, to)).or_insert(Duration::INFINITE);
        *slot = (*slot).min(d);
        Ok(())
    })?;

    let mut rides: BTreeMap<(NodeId, NodeId), Vec<Connection>> = BTreeMap::new();
    Rows::open(dir.join(CONNECTIONS_FILE))?.each(5, |f| {
        let from = f.node(&g, 0)?;
        let to = f.node(&g, 1)?;
        let dep = TimePoint::new(f.secs(2, "departure")?);
        let arr = TimePoint::new(f.secs(3, "arrival")?);
        let trip = g.intern_trip(f.str(4));
        let c = Connection::new(dep, arr, trip).map_err(|e| f.error(e.to_string()))?;
        rides.entry((from, to)).or_default().push(c);
        Ok(())
    })?;

    for ((from, to), walk) in walks {
        g.add_edge(from, to, EdgeAtf::walk_only(walk))?;
    }
    for ((from, to), conns) in rides {
        g.add_edge(
            from,
            to,
            EdgeAtf::from_connections(Duration::INFINITE, conns),
        )?;
    }
    g.validate()?;
    Ok(g)
}

/// Writes `graph` as a dataset directory (created if missing). Walks are
/// written as metres at 1 m/s.
pub fn write_csv(graph: &TransportGraph, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_tables(
        graph,
        fs::File::create(dir.join(NODES_FILE))?,
        fs::File::create(dir.join(FOOTPATHS_FILE))?,
        fs::File::create(dir.join(CONNECTIONS_FILE))?,
    )
}

/// The three files concatenated; equal strings mean equal datasets.
pub fn to_csv_string(graph: &TransportGraph) -> Result<String> {
    let (mut a, mut b, mut c) = (Vec::new(), Vec::new(), Vec::new());
    write_tables(graph, &mut a, &mut b, &mut c)?;
    a.extend(b);
    a.extend(c);
    Ok(String::from_utf8(a).expect("csv output is utf-8"))
}

fn write_tables(
    graph: &TransportGraph,
    nodes: impl Write,
    foot: impl Write,
    conns: impl Write,
) -> Result<()> {
    let mut nodes = csv::Writer::from_writer(nodes);
    nodes.write_record(["node_id", "lat", "lon"])?;
    for r in graph.records() {
        nodes.write_record([r.id.as_str(), &r.lat.to_string(), &r.lon.to_string()])?;
    }
    nodes.flush()?;

    let mut foot = csv::Writer::from_writer(foot);
    foot.write_record(["from_id", "to_id", "duration_s"])?;
    let mut conns = csv::Writer::from_writer(conns);
    conns.write_record(["from_id", "to_id", "dep_s", "arr_s", "trip_label"])?;
    for (u, e) in graph.edges() {
        let (from, to) = (
            graph.record(u).id.as_str(),
            graph.record(e.target).id.as_str(),
        );
        if e.atf.walk().is_finite() {
            foot.write_record([from, to, &e.atf.walk().secs().to_string()])?;
        }
        for c in e.atf.timetable().iter() {
            let label = graph.trips().get(c.trip).unwrap_or("");
            conns.write_record([
                from,
                to,
                &c.departure.secs().to_string(),
                &c.arrival.secs().to_string(),
                label,
            ])?;
        }
    }
    foot.flush()?;
    conns.flush()?;
    Ok(())
}

/// Writes a short human-readable summary of a graph.
pub fn describe(graph: &TransportGraph, mut out: impl Write) -> std::io::Result<()> {
    use crate::model::Adjacency;
    let timetabled = graph
        .edges()
        .filter(|(_, e)| !e.atf.timetable().is_empty())
        .count();
    let walkable = graph
        .edges()
        .filter(|(_, e)| e.atf.walk().is_finite())
        .count();
    writeln!(out, "nodes:        {}", graph.node_count())?;
    writeln!(out, "edges:        {}", graph.edge_count())?;
    writeln!(out, "  timetabled: {timetabled}")?;
    writeln!(out, "  walkable:   {walkable}")?;
    writeln!(out, "connections:  {}", graph.connection_count())?;
    writeln!(out, "trips:        {}", graph.trips().len())
}
