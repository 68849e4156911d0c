//! Dense phase-one simplex: minimize the L1 infeasibility of `A x = b`,
//! `x ≥ 0`.

const PIVOT_TOL: f64 = 1e-11;
const REDUCED_COST_TOL: f64 = 1e-12;
/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_STREAK: usize = 50;

#[derive(Debug, Clone)]
pub struct PhaseOne {
    pub x: Vec<f64>,
    /// Optimal `Σ |A x − b|` (the artificial objective).
    pub infeasibility: f64,
    pub iterations: usize,
}

/// `rows[i]` is row `i` of `A`; every row must have the same length.
pub fn phase_one(rows: &[Vec<f64>], b: &[f64], max_iterations: usize) -> Result<PhaseOne, String> {
    let m = rows.len();
    if m != b.len() {
        return Err(format!(
            "{m} constraint rows but {} right-hand sides",
            b.len()
        ));
    }
    let n = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != n) {
        return Err("ragged constraint matrix".into());
    }
    let width = n + m + 1;
    let rhs = n + m;
    // rows 0..m are constraints, row m holds reduced costs
    let mut tab = vec![0.0f64; (m + 1) * width];
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            tab[i * width + j] = sign * rows[i][j];
        }
        tab[i * width + n + i] = 1.0;
        tab[i * width + rhs] = sign * b[i];
    }
    for j in 0..n {
        tab[m * width + j] = -(0..m).map(|i| tab[i * width + j]).sum::<f64>();
    }
    tab[m * width + rhs] = -(0..m).map(|i| tab[i * width + rhs]).sum::<f64>();
    let mut basis: Vec<usize> = (n..n + m).collect();

    let mut iterations = 0;
    let mut degenerate = 0;
    loop {
        let bland = degenerate >= DEGENERATE_STREAK;
        let costs = &tab[m * width..m * width + n + m];
        let entering = if bland {
            costs.iter().position(|&r| r < -REDUCED_COST_TOL)
        } else {
            costs
                .iter()
                .enumerate()
                .filter(|(_, &r)| r < -REDUCED_COST_TOL)
                .min_by(|a, b| a.1.total_cmp(b.1))
                .map(|(j, _)| j)
        };
        let Some(col) = entering else { break };

        let mut leaving: Option<(usize, f64)> = None;
        for i in 0..m {
            let a = tab[i * width + col];
            if a > PIVOT_TOL {
                let ratio = tab[i * width + rhs] / a;
                let better = match leaving {
                    None => true,
                    Some((r, best)) => {
                        ratio < best - 1e-15 || (ratio <= best + 1e-15 && basis[i] < basis[r])
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
        }
        // the artificial objective is bounded below by zero
        let Some((row, ratio)) = leaving else {
            return Err("unbounded direction in phase one".into());
        };
        degenerate = if ratio.abs() < 1e-14 {
            degenerate + 1
        } else {
            0
        };

        pivot(&mut tab, width, m, row, col);
        basis[row] = col;
        iterations += 1;
        if iterations >= max_iterations {
            return Err(format!("no convergence after {iterations} pivots"));
        }
    }

    let mut x = vec![0.0; n];
    for (i, &var) in basis.iter().enumerate() {
        if var < n {
            x[var] = tab[i * width + rhs];
        }
    }
    Ok(PhaseOne {
        x,
        infeasibility: -tab[m * width + rhs],
        iterations,
    })
}

fn pivot(tab: &mut [f64], width: usize, m: usize, row: usize, col: usize) {
    let inv = 1.0 / tab[row * width + col];
    for v in &mut tab[row * width..(row + 1) * width] {
        *v *= inv;
    }
    tab[row * width + col] = 1.0;
    let pivot_row: Vec<f64> = tab[row * width..(row + 1) * width].to_vec();
    for i in 0..=m {
        if i == row {
            continue;
        }
        let factor = tab[i * width + col];
        if factor == 0.0 {
            continue;
        }
        let target = &mut tab[i * width..(i + 1) * width];
        for (t, p) in target.iter_mut().zip(&pivot_row) {
            *t -= factor * p;
        }
        target[col] = 0.0;
    }
}
