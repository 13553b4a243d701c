//! Is there a player who beats everybody? Knockout, then a check round.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bracket {
    /// Player 1 plays 2, the winner plays 3, and so on.
    Linear,
    /// Single elimination padded to a power of two; byes are free.
    Balanced,
}

#[derive(Debug, Clone, Serialize)]
pub struct TournamentOutcome {
    pub answer: bool,
    pub queries: usize,
    pub champion: usize,
}

struct Referee<'a> {
    oracle: &'a mut dyn FnMut(usize, usize) -> usize,
    played: HashMap<(usize, usize), usize>,
}

impl Referee<'_> {
    fn play(&mut self, i: usize, j: usize) -> Result<usize> {
        let key = (i.min(j), i.max(j));
        if let Some(&w) = self.played.get(&key) {
            return Ok(w);
        }
        let w = (self.oracle)(i, j);
        if w != i && w != j {
            return Err(Error::BadOracle { i, j, winner: w });
        }
        self.played.insert(key, w);
        Ok(w)
    }
}

/// Players are `1..=n`; `oracle(i, j)` returns the winner of `i` vs `j`.
pub fn tournament_algorithm(
    n: usize,
    oracle: &mut dyn FnMut(usize, usize) -> usize,
    bracket: Bracket,
) -> Result<TournamentOutcome> {
    if n < 2 {
        return Err(Error::OutOfRange {
            name: "n",
            value: n as i64,
            range: "n ≥ 2",
        });
    }
    let mut referee = Referee {
        oracle,
        played: HashMap::new(),
    };
    let champion = match bracket {
        Bracket::Linear => {
            let mut c = 1;
            for p in 2..=n {
                c = referee.play(c, p)?;
            }
            c
        }
        Bracket::Balanced => {
            // Byes all fall in the first round, so every later round is full.
            let size = n.next_power_of_two();
            let byes = size - n;
            let mut round: Vec<usize> = (1..=byes).collect();
            let mut k = byes + 1;
            while k < n {
                round.push(referee.play(k, k + 1)?);
                k += 2;
            }
            while round.len() > 1 {
                let mut next = Vec::with_capacity(round.len() / 2);
                for pair in round.chunks(2) {
                    next.push(referee.play(pair[0], pair[1])?);
                }
                round = next;
            }
            round[0]
        }
    };
    let mut answer = true;
    for p in 1..=n {
        if p != champion && referee.play(champion, p)? != champion {
            answer = false;
            break;
        }
    }
    Ok(TournamentOutcome {
        answer,
        queries: referee.played.len(),
        champion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random_tournament(n: usize, seed: u64) -> Vec<Vec<bool>> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut beats = vec![vec![false; n + 1]; n + 1];
        for i in 1..=n {
            for j in i + 1..=n {
                let w = rng.random_bool(0.5);
                beats[i][j] = w;
                beats[j][i] = !w;
            }
        }
        // plant a dominating player in about half of them
        if seed.is_multiple_of(2) {
            let d = rng.random_range(1..=n);
            for j in 1..=n {
                if j != d {
                    beats[d][j] = true;
                    beats[j][d] = false;
                }
            }
        }
        beats
    }

    fn brute(beats: &[Vec<bool>], n: usize) -> bool {
        (1..=n).any(|p| (1..=n).all(|q| q == p || beats[p][q]))
    }

    #[test]
    fn bounds_and_answers() {
        for seed in 0..100u64 {
            let n = 2 + (seed as usize % 15);
            let beats = random_tournament(n, seed);
            for bracket in [Bracket::Linear, Bracket::Balanced] {
                let mut oracle = |i: usize, j: usize| if beats[i][j] { i } else { j };
                let out = tournament_algorithm(n, &mut oracle, bracket).unwrap();
                assert_eq!(out.answer, brute(&beats, n));
                let bound = match bracket {
                    Bracket::Linear => 2 * n - 3,
                    Bracket::Balanced => 2 * n - n.ilog2() as usize,
                };
                assert!(out.queries <= bound, "n={n} {bracket:?} {}", out.queries);
            }
        }
    }

    #[test]
    fn bad_oracle() {
        let mut oracle = |_: usize, _: usize| 7;
        assert_eq!(
            tournament_algorithm(3, &mut oracle, Bracket::Linear).unwrap_err(),
            Error::BadOracle { i: 1, j: 2, winner: 7 }
        );
    }
}
