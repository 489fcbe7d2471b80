//! ASCII and SVG pictures of one-dimensional trajectories.

use std::fmt::Write;

use sandlab_core::config::{Configuration, Line};
use sandlab_core::Height;

pub struct View {
    pub horiz: (i64, i64),
    pub vert: (i64, i64),
}

fn lines(frames: &[(u64, Configuration)]) -> Result<Vec<(u64, &Line)>, String> {
    frames
        .iter()
        .map(|(s, x)| x.as_line().map(|l| (*s, l)).ok_or_else(|| "only one-dimensional lines can be rendered".into()))
        .collect()
}

/// Smallest window showing every core and one background cell on each side;
/// vertically the range of finite heights.
pub fn fit(frames: &[(u64, Configuration)], vert: Option<(i64, i64)>) -> Result<View, String> {
    let ls = lines(frames)?;
    let lo = ls.iter().map(|(_, l)| l.origin() - 1).min().unwrap_or(-1);
    let hi = ls.iter().map(|(_, l)| l.end()).max().unwrap_or(0);
    let finite = ls
        .iter()
        .flat_map(|(_, l)| l.core().iter().copied().chain([l.left(), l.right()]))
        .filter_map(Height::finite);
    let (mut vlo, mut vhi) = (i64::MAX, i64::MIN);
    for v in finite {
        vlo = vlo.min(v);
        vhi = vhi.max(v);
    }
    if vlo > vhi {
        (vlo, vhi) = (0, 0);
    }
    let vert = vert.unwrap_or((vlo, vhi));
    if vert.0 > vert.1 {
        return Err(format!("empty vertical window [{}, {}]", vert.0, vert.1));
    }
    Ok(View { horiz: (lo, hi), vert })
}

fn glyph(h: Height, k: i64) -> char {
    match h {
        Height::PosInf => '|',
        Height::NegInf => ' ',
        Height::Finite(v) if v >= k => '#',
        Height::Finite(_) => '.',
    }
}

pub fn ascii(frames: &[(u64, Configuration)], vert: Option<(i64, i64)>) -> Result<String, String> {
    let view = fit(frames, vert)?;
    let mut s = String::new();
    for (n, (step, l)) in lines(frames)?.into_iter().enumerate() {
        if n > 0 {
            s.push('\n');
        }
        let _ = writeln!(s, "step {step}");
        for k in (view.vert.0..=view.vert.1).rev() {
            let row: String = (view.horiz.0..=view.horiz.1).map(|i| glyph(l.at(i), k)).collect();
            let _ = writeln!(s, "{row} {k}");
        }
    }
    Ok(s)
}

const CELL: i64 = 12;

pub fn svg(frames: &[(u64, Configuration)], vert: Option<(i64, i64)>) -> Result<String, String> {
    let view = fit(frames, vert)?;
    let ls = lines(frames)?;
    let cols = view.horiz.1 - view.horiz.0 + 1;
    let rows = view.vert.1 - view.vert.0 + 1;
    let frame_h = (rows + 2) * CELL;
    let width = (cols + 2) * CELL;
    let height = frame_h * ls.len() as i64;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
    );
    let _ = writeln!(s, "<rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>");
    for (n, (step, l)) in ls.iter().enumerate() {
        let top = n as i64 * frame_h;
        let _ = writeln!(s, "<g id=\"step-{step}\">");
        let _ = writeln!(s, "<text x=\"{CELL}\" y=\"{}\" font-family=\"monospace\" font-size=\"10\">step {step}</text>", top + CELL - 2);
        for (c, i) in (view.horiz.0..=view.horiz.1).enumerate() {
            for (r, k) in (view.vert.0..=view.vert.1).rev().enumerate() {
                let fill = match glyph(l.at(i), k) {
                    '#' => "#c8a165",
                    '|' => "#6b4a1f",
                    _ => continue,
                };
                let x = (c as i64 + 1) * CELL;
                let y = top + (r as i64 + 1) * CELL;
                let _ = writeln!(s, "<rect x=\"{x}\" y=\"{y}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"{fill}\" stroke=\"#444\" stroke-width=\"0.5\"/>");
            }
        }
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    Ok(s)
}
