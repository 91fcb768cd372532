//! Plain-text map format.
//!
//! ```text
//! 5 5
//! .S...
//! .....
//! ..B..
//! .....
//! .....
//! ```
//!
//! The first line holds `rows cols`. Each of the following `rows` lines
//! holds exactly `cols` characters: `.` free, `B` bin, `S` station.
//! Trailing whitespace on any line and blank lines after the grid are ignored.

use super::{CellKind, MapError, WarehouseMap};

pub fn load_map(text: &str) -> Result<WarehouseMap, MapError> {
    let mut lines = text.lines().enumerate();
    let (rows, cols) = {
        let (_, header) = lines.next().ok_or_else(|| parse_err(1, 1, "empty input"))?;
        let mut parts = header.split_whitespace();
        let mut field = |name: &str| -> Result<usize, MapError> {
            let raw = parts
                .next()
                .ok_or_else(|| parse_err(1, 1, &format!("header is missing {name}")))?;
            raw.parse::<usize>()
                .map_err(|_| parse_err(1, 1, &format!("{name} `{raw}` is not a positive integer")))
        };
        let rows = field("rows")?;
        let cols = field("cols")?;
        if parts.next().is_some() {
            return Err(parse_err(1, 1, "header must be `rows cols`"));
        }
        if rows == 0 || cols == 0 {
            return Err(parse_err(1, 1, "dimensions must be positive"));
        }
        (rows, cols)
    };

    let mut cells = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let (lineno, line) = lines
            .next()
            .ok_or_else(|| parse_err(r + 2, 1, &format!("expected {rows} grid rows, found {r}")))?;
        let line = line.trim_end();
        let mut width = 0;
        for (c, ch) in line.chars().enumerate() {
            let kind = match ch {
                '.' => CellKind::Free,
                'B' => CellKind::Bin,
                'S' => CellKind::Station,
                other => {
                    return Err(parse_err(
                        lineno + 1,
                        c + 1,
                        &format!("unknown cell character `{other}`"),
                    ))
                }
            };
            if c >= cols {
                return Err(parse_err(lineno + 1, c + 1, &format!("row longer than {cols} columns")));
            }
            cells.push(kind);
            width += 1;
        }
        if width != cols {
            return Err(parse_err(
                lineno + 1,
                width + 1,
                &format!("ragged row: {width} columns, expected {cols}"),
            ));
        }
    }
    if let Some((lineno, line)) = lines.find(|(_, l)| !l.trim().is_empty()) {
        return Err(parse_err(
            lineno + 1,
            1,
            &format!("unexpected content after grid: `{}`", line.trim()),
        ));
    }

    WarehouseMap::from_cells(rows, cols, cells).map_err(|e| match e {
        MapError::Invariant(msg) => invariant_err(&msg, cols),
        other => other,
    })
}

pub fn save_map(map: &WarehouseMap) -> String {
    let mut out = String::with_capacity((map.cols() + 1) * (map.rows() + 1));
    out.push_str(&format!("{} {}\n", map.rows(), map.cols()));
    for r in 0..map.rows() {
        for c in 0..map.cols() {
            out.push(match map.kind((r, c).into()) {
                CellKind::Free => '.',
                CellKind::Bin => 'B',
                CellKind::Station => 'S',
            });
        }
        out.push('\n');
    }
    out
}

fn parse_err(line: usize, column: usize, message: &str) -> MapError {
    MapError::Parse {
        line,
        column,
        message: message.to_string(),
    }
}

/// Invariant failures carry a `(row, col)` in their message; point the parse
/// error at the corresponding text position.
fn invariant_err(msg: &str, cols: usize) -> MapError {
    let pos = msg.find('(').and_then(|open| {
        let close = msg[open..].find(')')? + open;
        let mut it = msg[open + 1..close].split(',').map(|s| s.trim().parse::<usize>());
        match (it.next(), it.next()) {
            (Some(Ok(r)), Some(Ok(c))) if c < cols => Some((r, c)),
            _ => None,
        }
    });
    let (line, column) = pos.map_or((1, 1), |(r, c)| (r + 2, c + 1));
    parse_err(line, column, msg)
}
