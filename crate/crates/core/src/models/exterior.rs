use crate::linalg::IntMat;

/// `q`-subsets of `0..n` in lexicographic order.
pub fn lex_subsets(n: usize, q: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, q: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == q {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < q - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, q, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, q, &mut Vec::new(), &mut out);
    out
}

/// `Λ^q(M)`: the matrix of `q × q` minors in lexicographic subset bases.
pub fn lambda_power(m: &IntMat, q: usize) -> IntMat {
    let rows = lex_subsets(m.rows(), q);
    let cols = lex_subsets(m.cols(), q);
    let mut out = IntMat::zeros(rows.len(), cols.len());
    for (i, r) in rows.iter().enumerate() {
        for (j, c) in cols.iter().enumerate() {
            out.set(i, j, m.select(r, c).det());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_powers() {
        let m = IntMat::from_rows(&[[1, 2], [3, 4]]);
        assert_eq!(lambda_power(&m, 1), m);
        assert_eq!(lambda_power(&m, 2), IntMat::from_rows(&[[-2]]));
        assert_eq!(lambda_power(&m, 0), IntMat::from_rows(&[[1]]));
        assert_eq!(lambda_power(&m, 3).shape(), (0, 0));
        assert_eq!(lex_subsets(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn cauchy_binet() {
        let a = IntMat::from_rows(&[[1, -2, 0], [3, 1, 2], [0, 4, -1]]);
        let b = IntMat::from_rows(&[[2, 0, 1], [-1, 1, 0], [1, 3, 5]]);
        assert_eq!(lambda_power(&(&a * &b), 2), &lambda_power(&a, 2) * &lambda_power(&b, 2));
    }
}
