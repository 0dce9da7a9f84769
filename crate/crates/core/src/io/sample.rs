//! Bit-packed sample rows and their CSV encoding.
//!
//! One row per graph, no header, fields in this order:
//!
//! ```text
//! n, optimal_k, w0(v0), w1(v0), w0(v1), w1(v1), ..., target(v0), ..., target(v[max-1])
//! ```
//!
//! Each vertex's adjacency row is packed into two unsigned 64-bit words, least
//! significant bit first: bit `j` of the first word is the edge to node `j`,
//! bit `j` of the second word the edge to node `64 + j`. Vertices `>= n` are
//! zero padded. Training rows carry a color in `1..=n` per real vertex and 0 in
//! the padding; inference rows have `optimal_k = 0` and every target set to 1.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{Coloring, Graph};

/// Neighbors addressable by two packed words.
pub const PACK_CAPACITY: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleRow {
    pub n: usize,
    /// Number of colors in the label; 0 when unknown (inference rows).
    pub optimal_k: u32,
    pub packed: Vec<u64>,
    pub target_colors: Vec<u32>,
}

pub fn pack_adjacency_row(g: &Graph, v: usize) -> Result<(u64, u64)> {
    if g.n() > PACK_CAPACITY {
        return Err(Error::TooLarge { n: g.n(), max: PACK_CAPACITY });
    }
    if v >= g.n() {
        return Err(Error::NodeOutOfRange { node: v, n: g.n() });
    }
    let row = g.row(v);
    Ok((row[0], row.get(1).copied().unwrap_or(0)))
}

fn check_fits(g: &Graph, max_nodes: usize) -> Result<()> {
    if max_nodes > PACK_CAPACITY {
        return Err(Error::InvalidParameter(format!(
            "max_nodes {max_nodes} exceeds the packed row capacity of {PACK_CAPACITY}"
        )));
    }
    if g.n() > max_nodes {
        return Err(Error::TooLarge { n: g.n(), max: max_nodes });
    }
    Ok(())
}

fn pack_graph(g: &Graph, max_nodes: usize) -> Result<Vec<u64>> {
    let mut packed = vec![0; 2 * max_nodes];
    for v in 0..g.n() {
        let (w0, w1) = pack_adjacency_row(g, v)?;
        packed[2 * v] = w0;
        packed[2 * v + 1] = w1;
    }
    Ok(packed)
}

impl SampleRow {
    pub fn training(g: &Graph, coloring: &Coloring, max_nodes: usize) -> Result<Self> {
        check_fits(g, max_nodes)?;
        if coloring.len() != g.n() {
            return Err(Error::LengthMismatch { expected: g.n(), got: coloring.len() });
        }
        let mut target_colors = vec![0; max_nodes];
        target_colors[..g.n()].copy_from_slice(coloring.as_slice());
        Ok(SampleRow {
            n: g.n(),
            optimal_k: coloring.colors_used() as u32,
            packed: pack_graph(g, max_nodes)?,
            target_colors,
        })
    }

    pub fn inference(g: &Graph, max_nodes: usize) -> Result<Self> {
        check_fits(g, max_nodes)?;
        Ok(SampleRow { n: g.n(), optimal_k: 0, packed: pack_graph(g, max_nodes)?, target_colors: vec![1; max_nodes] })
    }

    pub fn max_nodes(&self) -> usize {
        self.target_colors.len()
    }

    pub fn is_inference(&self) -> bool {
        self.optimal_k == 0 && self.target_colors.iter().all(|&c| c == 1)
    }

    pub fn word_pair(&self, v: usize) -> (u64, u64) {
        (self.packed[2 * v], self.packed[2 * v + 1])
    }

    pub fn graph(&self) -> Result<Graph> {
        unpack_sample(self).map(|(g, _)| g)
    }
}

/// Rebuilds the graph (and the label, for training rows) from a packed row.
pub fn unpack_sample(row: &SampleRow) -> Result<(Graph, Option<Coloring>)> {
    let max = row.max_nodes();
    if max > PACK_CAPACITY {
        return Err(Error::InvalidSample(format!("max_nodes {max} exceeds {PACK_CAPACITY}")));
    }
    if row.packed.len() != 2 * max {
        return Err(Error::InvalidSample(format!(
            "{} packed words for {max} nodes, expected {}",
            row.packed.len(),
            2 * max
        )));
    }
    if row.n == 0 || row.n > max {
        return Err(Error::InvalidSample(format!("node count {} outside 1..={max}", row.n)));
    }
    let n = row.n;
    let bit = |v: usize, j: usize| -> bool {
        let (w0, w1) = row.word_pair(v);
        if j < 64 {
            w0 >> j & 1 == 1
        } else {
            w1 >> (j - 64) & 1 == 1
        }
    };
    for v in 0..max {
        let (w0, w1) = row.word_pair(v);
        if v >= n {
            if w0 != 0 || w1 != 0 {
                return Err(Error::InvalidSample(format!("nonzero padding for vertex {v}")));
            }
            continue;
        }
        // bits for j >= n are padding
        let mut stray = if n >= 64 { 0 } else { w0 >> n };
        stray |= if n >= 128 {
            0
        } else if n > 64 {
            w1 >> (n - 64)
        } else {
            w1
        };
        if stray != 0 {
            return Err(Error::InvalidSample(format!("vertex {v} has neighbors beyond node {}", n - 1)));
        }
    }
    let mut g = Graph::new(n)?;
    for u in 0..n {
        if bit(u, u) {
            return Err(Error::InvalidSample(format!("self-loop on vertex {u}")));
        }
        for v in u + 1..n {
            match (bit(u, v), bit(v, u)) {
                (true, true) => g.add_edge(u, v)?,
                (false, false) => {}
                _ => return Err(Error::InvalidSample(format!("asymmetric adjacency between {u} and {v}"))),
            }
        }
    }
    if row.is_inference() {
        return Ok((g, None));
    }
    if row.optimal_k == 0 {
        return Err(Error::InvalidSample("training row without a color count".into()));
    }
    if let Some(i) = row.target_colors[n..].iter().position(|&c| c != 0) {
        return Err(Error::InvalidSample(format!("nonzero target padding at position {}", n + i)));
    }
    let coloring = Coloring::new(row.target_colors[..n].to_vec()).map_err(|e| Error::InvalidSample(e.to_string()))?;
    Ok((g, Some(coloring)))
}

pub fn write_csv_to<W: Write>(mut out: W, rows: &[SampleRow]) -> std::io::Result<()> {
    let mut line = String::new();
    for row in rows {
        line.clear();
        use std::fmt::Write as _;
        let _ = write!(line, "{},{}", row.n, row.optimal_k);
        for w in &row.packed {
            let _ = write!(line, ",{w}");
        }
        for c in &row.target_colors {
            let _ = write!(line, ",{c}");
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    out.flush()
}

pub fn write_csv(path: &Path, rows: &[SampleRow]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv_to(BufWriter::new(file), rows).map_err(|e| Error::io(path, e))
}

/// Appends rows to an existing (or new) sample file.
pub fn append_csv(path: &Path, rows: &[SampleRow]) -> Result<()> {
    let file = std::fs::OpenOptions::new().create(true).append(true).open(path).map_err(|e| Error::io(path, e))?;
    write_csv_to(BufWriter::new(file), rows).map_err(|e| Error::io(path, e))
}

/// Parses one CSV line. Line numbers in errors are 1-based.
pub fn parse_csv_line(line: &str, line_no: usize, max_nodes: usize) -> Result<SampleRow> {
    let expected = 2 + 3 * max_nodes;
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != expected {
        return Err(Error::parse(line_no, format!("expected {expected} fields, found {}", fields.len())));
    }
    let int = |i: usize| -> Result<u64> {
        fields[i].trim().parse::<u64>().map_err(|_| {
            Error::parse(line_no, format!("field {} ({:?}) is not an unsigned 64-bit integer", i + 1, fields[i]))
        })
    };
    let small = |i: usize| -> Result<u32> {
        let v = int(i)?;
        u32::try_from(v).map_err(|_| Error::parse(line_no, format!("field {} value {v} too large", i + 1)))
    };
    let n = small(0)? as usize;
    let optimal_k = small(1)?;
    let packed = (2..2 + 2 * max_nodes).map(int).collect::<Result<Vec<_>>>()?;
    let target_colors = (2 + 2 * max_nodes..expected).map(small).collect::<Result<Vec<_>>>()?;
    let row = SampleRow { n, optimal_k, packed, target_colors };
    unpack_sample(&row).map_err(|e| Error::parse(line_no, e.to_string()))?;
    Ok(row)
}

pub fn read_csv_from<R: BufRead>(input: R, max_nodes: usize) -> Result<Vec<SampleRow>> {
    let mut rows = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::parse(i + 1, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        rows.push(parse_csv_line(&line, i + 1, max_nodes)?);
    }
    Ok(rows)
}

pub fn read_csv(path: &Path, max_nodes: usize) -> Result<Vec<SampleRow>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv_from(BufReader::new(file), max_nodes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pack_examples() {
        let p = Graph::path(3).unwrap();
        assert_eq!(pack_adjacency_row(&p, 1).unwrap(), (5, 0));
        let mut g = Graph::new(70).unwrap();
        assert_eq!(pack_adjacency_row(&g, 5).unwrap(), (0, 0));
        g.add_edge(3, 64).unwrap();
        assert_eq!(pack_adjacency_row(&g, 3).unwrap(), (0, 1));
        assert!(pack_adjacency_row(&g, 70).is_err());
        assert!(pack_adjacency_row(&Graph::new(129).unwrap(), 0).is_err());
    }

    #[test]
    fn k2_line_layout() {
        // hand-packed: vertex 0 -> bit 1 (=2), vertex 1 -> bit 0 (=1)
        let g = Graph::complete(2).unwrap();
        let row = SampleRow::training(&g, &Coloring::new(vec![1, 2]).unwrap(), 100).unwrap();
        let mut buf = Vec::new();
        write_csv_to(&mut buf, std::slice::from_ref(&row)).unwrap();
        let line = String::from_utf8(buf).unwrap();
        let mut expected = String::from("2,2,2,0,1,0");
        expected.push_str(&",0".repeat(196));
        expected.push_str(",1,2");
        expected.push_str(&",0".repeat(98));
        expected.push('\n');
        assert_eq!(line, expected);
        assert_eq!(line.trim_end().split(',').count(), 302);
        let back = read_csv_from(line.as_bytes(), 100).unwrap();
        assert_eq!(back, vec![row]);
        let (g2, c) = unpack_sample(&back[0]).unwrap();
        assert_eq!(g2, g);
        assert_eq!(c.unwrap().as_slice(), &[1, 2]);
    }

    #[test]
    fn empty_input_reads_zero_rows() {
        assert!(read_csv_from(&b""[..], 100).unwrap().is_empty());
    }

    #[test]
    fn short_line_names_line_number() {
        let row = SampleRow::inference(&Graph::new(1).unwrap(), 100).unwrap();
        let mut buf = Vec::new();
        write_csv_to(&mut buf, &[row.clone(), row]).unwrap();
        let mut text = String::from_utf8(buf).unwrap();
        text.truncate(text.trim_end().rfind(',').unwrap());
        match read_csv_from(text.as_bytes(), 100) {
            Err(Error::Parse { line: 2, msg }) => assert!(msg.contains("301"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_integers() {
        let mut fields = vec!["1".to_string(); 2];
        fields.extend(std::iter::repeat_n("0".to_string(), 6));
        fields[2] = "18446744073709551616".into();
        assert!(parse_csv_line(&fields.join(","), 1, 2).is_err());
        fields[2] = "x".into();
        assert!(parse_csv_line(&fields.join(","), 1, 2).is_err());
    }

    #[test]
    fn unpack_rejects_asymmetry_loops_and_padding() {
        let g = Graph::path(3).unwrap();
        let good = SampleRow::inference(&g, 4).unwrap();
        let mut asym = good.clone();
        asym.packed[0] = 0;
        assert!(unpack_sample(&asym).is_err());
        let mut diag = good.clone();
        diag.packed[0] |= 1;
        assert!(unpack_sample(&diag).is_err());
        let mut pad = good.clone();
        pad.packed[7] = 4;
        assert!(unpack_sample(&pad).is_err());
        let mut beyond = good;
        beyond.packed[0] |= 1 << 3;
        beyond.packed[6] |= 1;
        assert!(unpack_sample(&beyond).is_err());
    }

    #[test]
    fn inference_row_has_no_coloring() {
        let g = Graph::cycle(5).unwrap();
        let row = SampleRow::inference(&g, 100).unwrap();
        assert!(row.target_colors.iter().all(|&c| c == 1));
        let (back, c) = unpack_sample(&row).unwrap();
        assert_eq!(back, g);
        assert!(c.is_none());
    }

    #[test]
    fn training_row_padding_checked() {
        let g = Graph::path(2).unwrap();
        let mut row = SampleRow::training(&g, &Coloring::new(vec![1, 2]).unwrap(), 4).unwrap();
        row.target_colors[3] = 1;
        assert!(unpack_sample(&row).is_err());
    }

    #[test]
    fn graph_larger_than_row() {
        assert!(SampleRow::inference(&Graph::new(101).unwrap(), 100).is_err());
        assert!(SampleRow::inference(&Graph::new(5).unwrap(), 129).is_err());
        assert!(SampleRow::inference(&Graph::new(120).unwrap(), 128).is_ok());
    }
}
