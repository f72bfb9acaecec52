//! Plain-text edge lists: one `u v` pair per line, 0-indexed, `#` comments.
//! An optional `n=<int>` line fixes the node count; otherwise it is the
//! largest index plus one.

use std::fmt::Write as _;

use super::Graph;
use crate::error::{Error, Result};

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut declared: Option<usize> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("n=") {
            if declared.is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "duplicate n= header".into(),
                });
            }
            let n = rest.trim().parse::<usize>().map_err(|e| Error::Parse {
                line: line_no,
                msg: format!("bad node count: {e}"),
            })?;
            declared = Some(n);
            continue;
        }
        let mut fields = line.split_whitespace();
        let mut next = |what: &str| -> Result<usize> {
            let tok = fields.next().ok_or_else(|| Error::Parse {
                line: line_no,
                msg: format!("missing {what} endpoint"),
            })?;
            tok.parse::<usize>().map_err(|e| Error::Parse {
                line: line_no,
                msg: format!("bad node index {tok:?}: {e}"),
            })
        };
        let u = next("first")?;
        let v = next("second")?;
        if fields.next().is_some() {
            return Err(Error::Parse {
                line: line_no,
                msg: "expected exactly two fields".into(),
            });
        }
        edges.push((u, v));
    }
    let inferred = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    let n = match declared {
        Some(n) => n,
        None if inferred == 0 => {
            return Err(Error::Parse {
                line: 0,
                msg: "no edges and no n= header".into(),
            })
        }
        None => inferred,
    };
    Ok(Graph::from_edges(n, edges)?.with_label("edgelist"))
}

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {}", g.label());
    let _ = writeln!(out, "n={}", g.node_count());
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{make_erdos_renyi, make_path, RngSeed};
    use proptest::prelude::*;

    #[test]
    fn parses_comments_and_header() {
        let g = parse_edge_list("# a triangle\n0 1\n1 2 # inline\n\n2 0\n").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        let g = parse_edge_list("n=5\n0 1\n").unwrap();
        assert_eq!(g.node_count(), 5);
        assert_eq!(g.first_isolated_node(), Some(2));
    }

    #[test]
    fn reports_bad_lines() {
        assert!(matches!(parse_edge_list("0 1\n1 x\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_edge_list("0\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_edge_list("0 1 2\n"), Err(Error::Parse { line: 1, .. })));
        assert!(parse_edge_list("# nothing\n").is_err());
        assert!(matches!(parse_edge_list("n=2\n0 5\n"), Err(Error::NodeOutOfRange { .. })));
        assert_eq!(parse_edge_list("1 1\n"), Err(Error::SelfLoop(1)));
    }

    #[test]
    fn writes_header() {
        let text = write_edge_list(&make_path(3).unwrap());
        assert_eq!(text, "# P_3\nn=3\n0 1\n1 2\n");
    }

    proptest! {
        #[test]
        fn round_trip(n in 1usize..40, p in 0.0f64..1.0, seed in any::<u64>()) {
            let g = make_erdos_renyi(n, p, RngSeed(seed)).unwrap();
            let back = parse_edge_list(&write_edge_list(&g)).unwrap();
            prop_assert_eq!(back, g);
        }
    }
}
