//! Text layouts for the grid mazes and the road graph.
//!
//! Grid files start with `retcap-grid v1`, followed by one text row per grid
//! row (`#` wall, `.` free, `S` start, `G` goal, `X` guard). Road files start
//! with `retcap-roads v1`, then `grid W H`, `start x,y`, `goal x,y` and one
//! `x,y x,y road-type` line per edge. In both formats lines beginning with
//! `;` are comments.

use crate::error::{Error, Result};
use std::collections::HashMap;

pub const DISCRETE_MAZE: &str = include_str!("../../data/maze_discrete.txt");
pub const CONTINUOUS_MAZE: &str = include_str!("../../data/maze_continuous.txt");
pub const AV_ROADS: &str = include_str!("../../data/av_roads.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    Wall,
    Free,
    Start,
    Goal,
    Guard,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridLayout {
    pub width: usize,
    pub height: usize,
    cells: Vec<Cell>,
    pub start: (usize, usize),
}

impl GridLayout {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        expect_magic(&mut lines, "retcap-grid v1")?;
        let mut cells = Vec::new();
        let mut width = None;
        let mut height = 0;
        let mut start = None;
        for (lineno, line) in lines {
            let row: Vec<Cell> = line
                .chars()
                .map(|c| match c {
                    '#' => Ok(Cell::Wall),
                    '.' => Ok(Cell::Free),
                    'S' => Ok(Cell::Start),
                    'G' => Ok(Cell::Goal),
                    'X' => Ok(Cell::Guard),
                    other => Err(Error::parse(lineno, format!("unknown cell character {other:?}"))),
                })
                .collect::<Result<_>>()?;
            match width {
                None => width = Some(row.len()),
                Some(w) if w != row.len() => {
                    return Err(Error::parse(lineno, format!("row has {} cells, expected {w}", row.len())))
                }
                _ => {}
            }
            for (col, cell) in row.iter().enumerate() {
                if *cell == Cell::Start {
                    if start.is_some() {
                        return Err(Error::parse(lineno, "more than one start cell"));
                    }
                    start = Some((height, col));
                }
            }
            cells.extend(row);
            height += 1;
        }
        let width = width.ok_or_else(|| Error::parse(1, "layout has no rows"))?;
        let start = start.ok_or_else(|| Error::parse(1, "layout has no start cell"))?;
        if !cells.contains(&Cell::Goal) {
            return Err(Error::parse(1, "layout has no goal cell"));
        }
        Ok(Self {
            width,
            height,
            cells,
            start,
        })
    }

    /// Cell at (row, col); anything outside the grid reads as wall.
    pub fn cell(&self, row: isize, col: isize) -> Cell {
        if row < 0 || col < 0 || row as usize >= self.height || col as usize >= self.width {
            Cell::Wall
        } else {
            self.cells[row as usize * self.width + col as usize]
        }
    }

    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.width + col
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// Breadth-first shortest path length from start to goal.
    pub fn shortest_path(&self, allow_guard: bool) -> Option<usize> {
        let mut dist = vec![usize::MAX; self.cells.len()];
        let mut queue = std::collections::VecDeque::new();
        dist[self.index(self.start.0, self.start.1)] = 0;
        queue.push_back(self.start);
        while let Some((r, c)) = queue.pop_front() {
            let d = dist[self.index(r, c)];
            if self.cell(r as isize, c as isize) == Cell::Goal {
                return Some(d);
            }
            for (dr, dc) in MOVES {
                let (nr, nc) = (r as isize + dr, c as isize + dc);
                let cell = self.cell(nr, nc);
                if cell == Cell::Wall || (cell == Cell::Guard && !allow_guard) {
                    continue;
                }
                let idx = self.index(nr as usize, nc as usize);
                if dist[idx] == usize::MAX {
                    dist[idx] = d + 1;
                    queue.push_back((nr as usize, nc as usize));
                }
            }
        }
        None
    }
}

/// Row/column deltas for up, down, left, right.
pub const MOVES: [(isize, isize); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RoadType {
    Highway,
    Main,
    Street,
    Lane,
}

impl RoadType {
    /// Small, medium and large traversal costs.
    pub fn costs(self) -> [f64; 3] {
        match self {
            RoadType::Lane => [7.0, 7.0, 8.0],
            RoadType::Street => [4.0, 5.0, 11.0],
            RoadType::Main => [2.0, 4.0, 13.0],
            RoadType::Highway => [1.0, 2.0, 18.0],
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "highway" => Some(RoadType::Highway),
            "main" => Some(RoadType::Main),
            "street" => Some(RoadType::Street),
            "lane" => Some(RoadType::Lane),
            _ => None,
        }
    }
}

/// Probabilities of the small, medium and large cost.
pub const ROAD_COST_PROBS: [f64; 3] = [0.4, 0.3, 0.3];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoadGraph {
    pub width: usize,
    pub height: usize,
    pub start: (usize, usize),
    pub goal: (usize, usize),
    edges: HashMap<((usize, usize), (usize, usize)), RoadType>,
}

impl RoadGraph {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        expect_magic(&mut lines, "retcap-roads v1")?;
        let (mut grid, mut start, mut goal) = (None, None, None);
        let mut edges = HashMap::new();
        for (lineno, line) in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                ["grid", w, h] => {
                    let dim = |s: &str| s.parse::<usize>().map_err(|_| Error::parse(lineno, "bad grid size"));
                    grid = Some((dim(w)?, dim(h)?));
                }
                ["start", node] => start = Some(parse_node(node, lineno)?),
                ["goal", node] => goal = Some(parse_node(node, lineno)?),
                [a, b, kind] => {
                    let a = parse_node(a, lineno)?;
                    let b = parse_node(b, lineno)?;
                    if a.0.abs_diff(b.0) + a.1.abs_diff(b.1) != 1 {
                        return Err(Error::parse(lineno, "edge must join lattice neighbours"));
                    }
                    let kind = RoadType::parse(kind)
                        .ok_or_else(|| Error::parse(lineno, format!("unknown road type {kind}")))?;
                    edges.insert(ordered(a, b), kind);
                }
                _ => return Err(Error::parse(lineno, format!("unrecognised line {line:?}"))),
            }
        }
        let (width, height) = grid.ok_or_else(|| Error::parse(1, "missing grid line"))?;
        let start = start.ok_or_else(|| Error::parse(1, "missing start line"))?;
        let goal = goal.ok_or_else(|| Error::parse(1, "missing goal line"))?;
        let inside = |n: (usize, usize)| n.0 < width && n.1 < height;
        if !inside(start) || !inside(goal) || edges.keys().any(|&(a, b)| !inside(a) || !inside(b)) {
            return Err(Error::parse(1, "node outside the grid"));
        }
        Ok(Self {
            width,
            height,
            start,
            goal,
            edges,
        })
    }

    pub fn road(&self, a: (usize, usize), b: (usize, usize)) -> Option<RoadType> {
        self.edges.get(&ordered(a, b)).copied()
    }

    pub fn node_count(&self) -> usize {
        self.width * self.height
    }

    pub fn node_index(&self, n: (usize, usize)) -> usize {
        n.1 * self.width + n.0
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

fn ordered(a: (usize, usize), b: (usize, usize)) -> ((usize, usize), (usize, usize)) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn parse_node(s: &str, lineno: usize) -> Result<(usize, usize)> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| Error::parse(lineno, format!("bad node {s:?}")))?;
    let coord = |v: &str| v.parse::<usize>().map_err(|_| Error::parse(lineno, format!("bad node {s:?}")));
    Ok((coord(x)?, coord(y)?))
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with(';'))
}

fn expect_magic<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, magic: &str) -> Result<()> {
    match lines.next() {
        Some((_, l)) if l == magic => Ok(()),
        Some((n, l)) => Err(Error::parse(n, format!("expected {magic:?}, found {l:?}"))),
        None => Err(Error::parse(1, "empty layout")),
    }
}
