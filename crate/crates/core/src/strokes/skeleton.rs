use crate::error::{Error, Result};

use super::raster::RasterGlyph;

/// Neighbours in the order P2..P9: N, NE, E, SE, S, SW, W, NW.
const RING: [(isize, isize); 8] = [
    (-1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
    (1, 0),
    (1, -1),
    (0, -1),
    (-1, -1),
];

fn ring(g: &RasterGlyph, r: usize, c: usize) -> [bool; 8] {
    let mut p = [false; 8];
    for (k, &(dr, dc)) in RING.iter().enumerate() {
        p[k] = g.get_i(r as isize + dr, c as isize + dc);
    }
    p
}

fn transitions(p: &[bool; 8]) -> usize {
    (0..8).filter(|&k| !p[k] && p[(k + 1) % 8]).count()
}

/// Yokoi 8-connectivity number; 1 means removing the pixel keeps local topology.
pub(crate) fn connectivity_number(g: &RasterGlyph, r: usize, c: usize) -> usize {
    // x1..x8 = E, NE, N, NW, W, SW, S, SE  (complemented)
    let p = ring(g, r, c);
    let x = [!p[2], !p[1], !p[0], !p[7], !p[6], !p[5], !p[4], !p[3]];
    [0usize, 2, 4, 6]
        .iter()
        .map(|&k| {
            let a = x[k] as usize;
            let b = (x[k] && x[(k + 1) % 8] && x[(k + 2) % 8]) as usize;
            a - b
        })
        .sum()
}

fn zs_candidates(g: &RasterGlyph, step: usize) -> Vec<(usize, usize)> {
    g.ink_pixels()
        .filter(|&(r, c)| {
            let p = ring(g, r, c);
            let b = p.iter().filter(|&&v| v).count();
            if !(2..=6).contains(&b) || transitions(&p) != 1 {
                return false;
            }
            // p[0]=P2 N, p[2]=P4 E, p[4]=P6 S, p[6]=P8 W
            if step == 0 {
                !(p[0] && p[2] && p[4]) && !(p[2] && p[4] && p[6])
            } else {
                !(p[0] && p[2] && p[6]) && !(p[0] && p[4] && p[6])
            }
        })
        .collect()
}

/// Each original component survives as exactly one component.
fn topology_preserved(g: &RasterGlyph, original: &[usize], n_original: usize) -> bool {
    let (labels, count) = g.component_labels();
    if count != n_original {
        return false;
    }
    let mut seen = vec![false; n_original];
    for (i, &l) in labels.iter().enumerate() {
        if l != usize::MAX {
            seen[original[i]] = true;
        }
    }
    seen.into_iter().all(|s| s)
}

/// One-pixel-wide skeleton by Zhang–Suen parallel thinning.
///
/// A sub-iteration whose parallel deletions would split or erase a connected
/// component is replayed sequentially with a simple-point check. A final pass
/// removes the 2×2 ink blocks that parallel thinning leaves on diagonal
/// strokes of even width.
pub fn skeletonize(glyph: &RasterGlyph) -> Result<RasterGlyph> {
    if glyph.ink_count() == 0 {
        return Err(Error::EmptyGlyph);
    }
    let (original, n_original) = glyph.component_labels();
    let mut img = glyph.clone();
    loop {
        let mut changed = false;
        for step in 0..2 {
            let cands = zs_candidates(&img, step);
            if cands.is_empty() {
                continue;
            }
            let mut trial = img.clone();
            for &(r, c) in &cands {
                trial.set(r, c, false);
            }
            if topology_preserved(&trial, &original, n_original) {
                img = trial;
                changed = true;
            } else {
                for &(r, c) in &cands {
                    let b = img.neighbors8(r, c).count();
                    if b >= 2 && connectivity_number(&img, r, c) == 1 {
                        img.set(r, c, false);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    remove_blocks(&mut img, glyph);
    Ok(img)
}

fn solid_blocks(g: &RasterGlyph) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for r in 0..g.height().saturating_sub(1) {
        for c in 0..g.width().saturating_sub(1) {
            if g.get(r, c) && g.get(r, c + 1) && g.get(r + 1, c) && g.get(r + 1, c + 1) {
                out.push((r, c));
            }
        }
    }
    out
}

fn remove_blocks(img: &mut RasterGlyph, original: &RasterGlyph) {
    let mut stuck: Vec<(usize, usize)> = Vec::new();
    while let Some((br, bc)) = solid_blocks(img).into_iter().find(|b| !stuck.contains(b)) {
        let cells = [(br, bc), (br, bc + 1), (br + 1, bc), (br + 1, bc + 1)];
        if let Some(&(r, c)) = cells
            .iter()
            .find(|&&(r, c)| img.neighbors8(r, c).count() >= 2 && connectivity_number(img, r, c) == 1)
        {
            img.set(r, c, false);
            continue;
        }
        // No simple pixel: try moving one block pixel onto an adjacent
        // original-ink position that keeps the component count.
        let blocks_before = solid_blocks(img).len();
        let components = img.component_count();
        let mut fixed = false;
        'swap: for &(r, c) in &cells {
            for (dr, dc) in [(-1isize, 0isize), (1, 0), (0, -1), (0, 1)] {
                let (qr, qc) = (r as isize + dr, c as isize + dc);
                if !original.get_i(qr, qc) || img.get_i(qr, qc) {
                    continue;
                }
                let (qr, qc) = (qr as usize, qc as usize);
                let mut trial = img.clone();
                trial.set(r, c, false);
                trial.set(qr, qc, true);
                if trial.component_count() == components && solid_blocks(&trial).len() < blocks_before {
                    *img = trial;
                    fixed = true;
                    break 'swap;
                }
            }
        }
        if !fixed {
            stuck.push((br, bc));
        }
    }
}
