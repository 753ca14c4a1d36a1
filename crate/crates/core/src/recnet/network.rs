//! The undirected recurrence network and its serialized edge-list form.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Simple undirected graph with sorted adjacency lists. Nodes are the state
/// vectors (0-based internally, 1-based in dumps); the diagonal is excluded
/// by construction (`A = R - I`). Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecurrenceNetwork {
    neighbors: Vec<Vec<u32>>,
    edge_count: usize,
}

impl RecurrenceNetwork {
    /// Builds a network from unique undirected edges `(i, j)` with `i < j`.
    pub fn from_edges(node_count: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let mut neighbors = vec![Vec::new(); node_count];
        for &(i, j) in edges {
            if i >= j {
                return Err(Error::InvalidParameter(format!(
                    "edge ({i}, {j}) is not in i < j form"
                )));
            }
            if j as usize >= node_count {
                return Err(Error::InvalidParameter(format!(
                    "edge ({i}, {j}) exceeds node count {node_count}"
                )));
            }
            neighbors[i as usize].push(j);
            neighbors[j as usize].push(i);
        }
        let mut net = Self {
            neighbors,
            edge_count: edges.len(),
        };
        for list in &mut net.neighbors {
            list.sort_unstable();
            list.dedup();
        }
        net.edge_count = net.neighbors.iter().map(Vec::len).sum::<usize>() / 2;
        Ok(net)
    }

    /// Assembles adjacency from per-node ascending neighbor lists holding
    /// only the higher endpoint of each edge.
    pub(crate) fn from_upper_lists(upper: Vec<Vec<u32>>) -> Self {
        let n = upper.len();
        let mut degree = vec![0usize; n];
        for (i, list) in upper.iter().enumerate() {
            for &j in list {
                degree[i] += 1;
                degree[j as usize] += 1;
            }
        }
        let mut neighbors: Vec<Vec<u32>> = degree.iter().map(|&d| Vec::with_capacity(d)).collect();
        let mut edge_count = 0usize;
        // Visiting i in ascending order keeps every adjacency list sorted:
        // node i first receives all lower endpoints (from earlier rows), then
        // appends its own ascending higher endpoints.
        for (i, list) in upper.iter().enumerate() {
            for &j in list {
                neighbors[i].push(j);
                neighbors[j as usize].push(i as u32);
                edge_count += 1;
            }
        }
        Self {
            neighbors,
            edge_count,
        }
    }

    pub fn node_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    /// Sorted neighbors of node `i`.
    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.neighbors[i]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors[i].binary_search(&(j as u32)).is_ok()
    }

    /// Undirected edges in lexicographic order with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.neighbors.iter().enumerate().flat_map(|(i, list)| {
            let i = i as u32;
            let start = list.partition_point(|&j| j <= i);
            list[start..].iter().map(move |&j| (i, j))
        })
    }

    /// Writes the 1-based edge list with a self-describing header.
    pub fn write_edge_list<W: Write>(
        &self,
        mut w: W,
        epsilon: f64,
        input_hash: &str,
    ) -> Result<()> {
        writeln!(w, "# recnetq edge list v1")?;
        writeln!(w, "# nodes {}", self.node_count())?;
        writeln!(w, "# edges {}", self.edge_count)?;
        writeln!(w, "# epsilon {epsilon:.17e}")?;
        writeln!(w, "# input_hash {input_hash}")?;
        for (i, j) in self.edges() {
            writeln!(w, "{} {}", i + 1, j + 1)?;
        }
        Ok(())
    }

    /// Parses an edge-list dump written by [`Self::write_edge_list`].
    /// Returns the network and the header key/value pairs.
    pub fn read_edge_list<R: BufRead>(r: R) -> Result<(Self, Vec<(String, String)>)> {
        let mut header = Vec::new();
        let mut edges: Vec<(u32, u32)> = Vec::new();
        let mut nodes: Option<usize> = None;
        let malformed = |reason: &str| Error::MalformedFile {
            path: "<edge list>".into(),
            reason: reason.into(),
        };
        for line in r.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let mut parts = rest.trim().splitn(2, ' ');
                if let Some(key) = parts.next() {
                    let value = parts.next().unwrap_or("").trim().to_string();
                    if key == "nodes" {
                        nodes = Some(
                            value
                                .parse()
                                .map_err(|_| malformed("unreadable node count"))?,
                        );
                    }
                    header.push((key.to_string(), value));
                }
                continue;
            }
            let mut parts = line.split_whitespace();
            let (a, b) = (parts.next(), parts.next());
            let (a, b) = match (a, b) {
                (Some(a), Some(b)) if parts.next().is_none() => (a, b),
                _ => return Err(malformed(&format!("bad edge line: {line}"))),
            };
            let a: u32 = a.parse().map_err(|_| malformed("bad endpoint"))?;
            let b: u32 = b.parse().map_err(|_| malformed("bad endpoint"))?;
            if a == 0 || b == 0 {
                return Err(malformed("endpoints are 1-based"));
            }
            edges.push((a - 1, b - 1));
        }
        let nodes = nodes.ok_or_else(|| malformed("missing '# nodes' header"))?;
        let net = Self::from_edges(nodes, &edges)?;
        Ok((net, header))
    }
}

/// Breadth-first reachability from node 0: true when every node is reached.
/// Empty and single-node graphs count as connected.
pub fn is_connected(net: &RecurrenceNetwork) -> bool {
    let n = net.node_count();
    if n <= 1 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::from([0u32]);
    seen[0] = true;
    let mut reached = 1usize;
    while let Some(i) = queue.pop_front() {
        for &j in net.neighbors(i as usize) {
            if !seen[j as usize] {
                seen[j as usize] = true;
                reached += 1;
                queue.push_back(j);
            }
        }
    }
    reached == n
}
