#![allow(dead_code)]

use h2ion::{SpinProjection, SpinState, TransitionSpec};

/// One published spin component at 4 T: lower N, 2·M_s, M_N, M_N', β (kHz/T), Δf_mag (kHz).
pub struct PublishedComponent {
    pub n: u32,
    pub twice_m_s: i32,
    pub m_n: i32,
    pub m_n_prime: i32,
    pub beta_khz: f64,
    pub shift_khz: f64,
}

impl PublishedComponent {
    pub fn spec(&self) -> TransitionSpec {
        let m_s = SpinProjection::from_twice(self.twice_m_s).unwrap();
        TransitionSpec::new(
            SpinState::para(0, self.n, m_s, self.m_n).unwrap(),
            SpinState::para(2, 2, m_s, self.m_n_prime).unwrap(),
            127e12,
        )
        .unwrap()
    }

    pub fn label(&self) -> String {
        format!("(0,{}) Ms={}/2 {}->{}", self.n, self.twice_m_s, self.m_n, self.m_n_prime)
    }
}

const fn row(n: u32, twice_m_s: i32, m_n: i32, m_n_prime: i32, beta_khz: f64, shift_khz: f64) -> PublishedComponent {
    PublishedComponent { n, twice_m_s, m_n, m_n_prime, beta_khz, shift_khz }
}

pub const SENSITIVITY_TABLE: [PublishedComponent; 48] = [
    row(0, 1, 0, -2, 13.8e3, 55.0e3),
    row(0, 1, 0, -1, 6.89e3, 27.6e3),
    row(0, 1, 0, 0, 23.5, 111.0),
    row(0, 1, 0, 1, -6.83e3, -27.3e3),
    row(0, 1, 0, 2, -13.7e3, -54.8e3),
    row(0, -1, 0, -2, 13.7e3, 54.9e3),
    row(0, -1, 0, -1, 6.86e3, 27.4e3),
    row(0, -1, 0, 0, -3.61, -71.2),
    row(0, -1, 0, 1, -6.86e3, -27.5e3),
    row(0, -1, 0, 2, -13.7e3, -54.9e3),
    row(2, 1, -2, -2, -259.0, -1.08e3),
    row(2, 1, -1, -1, -114.0, -504.0),
    row(2, 1, 0, 0, 32.5, 84.8),
    row(2, 1, 1, 1, 181.0, 681.0),
    row(2, 1, 2, 2, 333.0, 1.28e3),
    row(2, 1, -2, -1, -7.13e3, -28.5e3),
    row(2, 1, -1, -2, 6.76e3, 27.0e3),
    row(2, 1, -1, 0, -6.98e3, -28.0e3),
    row(2, 1, 0, -1, 6.90e3, 27.5e3),
    row(2, 1, 0, 1, -6.83e3, -27.4e3),
    row(2, 1, 1, 0, 7.04e3, 28.1e3),
    row(2, 1, 1, 2, -6.70e3, -26.8e3),
    row(2, 1, 2, 1, 7.19e3, 28.7e3),
    row(2, 1, -2, 0, -14.0e3, -56.0e3),
    row(2, 1, -1, 1, -13.8e3, -55.4e3),
    row(2, 1, 0, -2, 13.8e3, 55.0e3),
    row(2, 1, 0, 2, -13.7e3, -54.8e3),
    row(2, 1, 1, -1, 13.9e3, 55.6e3),
    row(2, 1, 2, 0, 14.0e3, 56.2e3),
    row(2, -1, -2, -2, -289.0, -1.20e3),
    row(2, -1, -1, -1, -145.0, -608.0),
    row(2, -1, 0, 0, 1.81, -16.3),
    row(2, -1, 1, 1, 150.0, 576.0),
    row(2, -1, 2, 2, 301.0, 1.17e3),
    row(2, -1, -2, -1, -7.17e3, -28.7e3),
    row(2, -1, -1, -2, 6.73e3, 26.9e3),
    row(2, -1, -1, 0, -7.01e3, -28.1e3),
    row(2, -1, 0, -1, 6.87e3, 27.5e3),
    row(2, -1, 0, 1, -6.86e3, -27.5e3),
    row(2, -1, 1, 0, 7.01e3, 28.0e3),
    row(2, -1, 1, 2, -6.70e3, -26.8e3),
    row(2, -1, 2, 1, 7.15e3, 28.6e3),
    row(2, -1, -2, 0, -14.0e3, -56.2e3),
    row(2, -1, -1, 1, -13.9e3, -55.5e3),
    row(2, -1, 0, -2, 13.7e3, 55.0e3),
    row(2, -1, 0, 2, -13.7e3, -54.9e3),
    row(2, -1, 1, -1, 13.9e3, 55.5e3),
    row(2, -1, 2, 0, 14.0e3, 56.0e3),
];

/// |computed − published| within max(relative·|published|, absolute).
pub fn within(computed: f64, published: f64, relative: f64, absolute: f64) -> bool {
    (computed - published).abs() <= (relative * published.abs()).max(absolute)
}

/// Coupled states |J M⟩ of j1 ⊗ j2 built by lowering from the stretched state
/// and orthogonalizing against higher J, with ⟨j1 j1; j2 J−j1|J J⟩ > 0.
/// Returns (J, M, amplitudes indexed by (m1 + j1)·(2j2 + 1) + (m2 + j2)).
pub fn coupled_basis(j1: i32, j2: i32) -> Vec<(i32, i32, Vec<f64>)> {
    let width = (2 * j2 + 1) as usize;
    let dim = (2 * j1 + 1) as usize * width;
    let index = |m1: i32, m2: i32| (m1 + j1) as usize * width + (m2 + j2) as usize;
    let ladder = |j: i32, m: i32| ((j * (j + 1) - m * (m - 1)) as f64).sqrt();
    let lower = |v: &[f64]| {
        let mut out = vec![0.0; dim];
        for m1 in -j1..=j1 {
            for m2 in -j2..=j2 {
                let a = v[index(m1, m2)];
                if a == 0.0 {
                    continue;
                }
                if m1 > -j1 {
                    out[index(m1 - 1, m2)] += ladder(j1, m1) * a;
                }
                if m2 > -j2 {
                    out[index(m1, m2 - 1)] += ladder(j2, m2) * a;
                }
            }
        }
        out
    };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut states: Vec<(i32, i32, Vec<f64>)> = Vec::new();
    for j in ((j1 - j2).abs()..=j1 + j2).rev() {
        let mut top = vec![0.0; dim];
        top[index(j1, j - j1)] = 1.0;
        for (_, _, s) in states.iter().filter(|(_, m, _)| *m == j) {
            let p = dot(&top, s);
            top.iter_mut().zip(s).for_each(|(t, x)| *t -= p * x);
        }
        let norm = dot(&top, &top).sqrt();
        let sign = top[index(j1, j - j1)].signum();
        top.iter_mut().for_each(|t| *t *= sign / norm);
        let mut current = top;
        for m in (-j..=j).rev() {
            let next = (m > -j).then(|| lower(&current).into_iter().map(|x| x / ladder(j, m)).collect::<Vec<_>>());
            states.push((j, m, current));
            match next {
                Some(n) => current = n,
                None => break,
            }
        }
    }
    states
}
