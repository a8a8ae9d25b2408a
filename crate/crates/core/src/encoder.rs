//! 19-plane encoding of a [`RawObservation`].
//!
//! | planes | content |
//! |--------|---------|
//! | 0-8    | one-hot board: passage, rigid, wooden, bomb, flames, fog, extra-bomb item, range item, kick item |
//! | 9-12   | positions: own, teammate, enemy 1, enemy 2 (only when visible) |
//! | 13-15  | broadcast ammo, blast strength, kick (1/0) |
//! | 16-17  | per-cell blast strength and remaining life of visible bombs |
//! | 18     | desirability code of each cell |

use alloc::vec;
use alloc::vec::Vec;

use crate::engine::{Cell, Position, PowerupKind, RawObservation, BOARD_SIZE, NUM_AGENTS};

pub const CHANNELS: usize = 19;
pub const PLANE: usize = BOARD_SIZE * BOARD_SIZE;
pub const TENSOR_LEN: usize = CHANNELS * PLANE;

pub mod channel {
    pub const PASSAGE: usize = 0;
    pub const RIGID: usize = 1;
    pub const WOODEN: usize = 2;
    pub const BOMB: usize = 3;
    pub const FLAMES: usize = 4;
    pub const FOG: usize = 5;
    pub const EXTRA_BOMB: usize = 6;
    pub const INCR_RANGE: usize = 7;
    pub const KICK_ITEM: usize = 8;
    pub const SELF_POS: usize = 9;
    pub const TEAMMATE_POS: usize = 10;
    pub const ENEMY1_POS: usize = 11;
    pub const ENEMY2_POS: usize = 12;
    pub const AMMO: usize = 13;
    pub const BLAST_STRENGTH: usize = 14;
    pub const CAN_KICK: usize = 15;
    pub const BOMB_STRENGTH: usize = 16;
    pub const BOMB_LIFE: usize = 17;
    pub const DESIRABILITY: usize = 18;
}

pub mod desirability {
    pub const POWERUP: u8 = 0;
    pub const WOODEN: u8 = 1;
    pub const PASSAGE: u8 = 2;
    pub const FOG: u8 = 3;
    pub const ENEMY: u8 = 4;
    pub const RIGID: u8 = 5;
    pub const TEAMMATE: u8 = 6;
    pub const BOMB: u8 = 7;
    pub const FLAMES: u8 = 8;
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EncodeError {
    #[error("observer position {0} is outside the board or fogged")]
    BadPosition(Position),
    #[error("observer {agent} is not at its reported position")]
    SelfMismatch { agent: usize },
    #[error("inconsistent agent ids (self {agent}, teammate {teammate}, enemies {enemies:?})")]
    BadIds {
        agent: usize,
        teammate: usize,
        enemies: [usize; 2],
    },
    #[error("tensor has {0} values, expected {TENSOR_LEN}")]
    BadLength(usize),
}

/// Channel-major `19 x 11 x 11` planes.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservationTensor {
    data: Vec<f32>,
}

impl ObservationTensor {
    pub fn zeros() -> Self {
        Self {
            data: vec![0.0; TENSOR_LEN],
        }
    }

    pub fn from_vec(data: Vec<f32>) -> Result<Self, EncodeError> {
        if data.len() != TENSOR_LEN {
            return Err(EncodeError::BadLength(data.len()));
        }
        Ok(Self { data })
    }

    #[inline]
    pub fn get(&self, ch: usize, r: usize, c: usize) -> f32 {
        self.data[ch * PLANE + r * BOARD_SIZE + c]
    }

    pub fn plane(&self, ch: usize) -> &[f32] {
        &self.data[ch * PLANE..(ch + 1) * PLANE]
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f32> {
        self.data
    }
}

fn validate(obs: &RawObservation) -> Result<(), EncodeError> {
    let p = obs.position;
    if p.r() >= BOARD_SIZE || p.c() >= BOARD_SIZE || obs.cell(p) == Cell::Fog {
        return Err(EncodeError::BadPosition(p));
    }
    let ids_ok = obs.agent < NUM_AGENTS
        && obs.teammate < NUM_AGENTS
        && obs.enemies.iter().all(|&e| e < NUM_AGENTS)
        && {
            let mut all = [obs.agent, obs.teammate, obs.enemies[0], obs.enemies[1]];
            all.sort_unstable();
            all == [0, 1, 2, 3]
        };
    if !ids_ok {
        return Err(EncodeError::BadIds {
            agent: obs.agent,
            teammate: obs.teammate,
            enemies: obs.enemies,
        });
    }
    if obs.agents[obs.agent] != Some(p) {
        return Err(EncodeError::SelfMismatch { agent: obs.agent });
    }
    Ok(())
}

/// Board one-hot index of a cell: fog, then flames, then bombs, then terrain
/// (a passage carrying a revealed item reports the item).
fn board_class(obs: &RawObservation, p: Position) -> usize {
    use channel::*;
    match obs.cell(p) {
        Cell::Fog => FOG,
        _ if obs.flame(p) => FLAMES,
        _ if obs.bomb(p).is_some() => BOMB,
        Cell::RigidWall => RIGID,
        Cell::WoodenWall => WOODEN,
        Cell::Passage => match obs.items[p.r()][p.c()] {
            Some(PowerupKind::ExtraBomb) => EXTRA_BOMB,
            Some(PowerupKind::IncrRange) => INCR_RANGE,
            Some(PowerupKind::Kick) => KICK_ITEM,
            None => PASSAGE,
        },
    }
}

/// Desirability codes with danger-descending precedence:
/// flames > bombs > agents > items > terrain. The observer's own cell is
/// coded by what lies under it.
pub fn desirability_map(obs: &RawObservation) -> [[u8; BOARD_SIZE]; BOARD_SIZE] {
    use desirability::*;
    let mut out = [[PASSAGE; BOARD_SIZE]; BOARD_SIZE];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            let p = Position::new(r, c);
            let cell = obs.cell(p);
            *v = if cell == Cell::Fog {
                FOG
            } else if obs.flame(p) {
                FLAMES
            } else if obs.bomb(p).is_some() {
                BOMB
            } else if let Some(id) = obs.agent_at(p).filter(|&id| id != obs.agent) {
                if id == obs.teammate {
                    TEAMMATE
                } else {
                    ENEMY
                }
            } else if cell == Cell::Passage && obs.items[r][c].is_some() {
                POWERUP
            } else {
                match cell {
                    Cell::WoodenWall => WOODEN,
                    Cell::RigidWall => RIGID,
                    _ => PASSAGE,
                }
            };
        }
    }
    out
}

pub fn encode(obs: &RawObservation) -> Result<ObservationTensor, EncodeError> {
    let mut t = ObservationTensor::zeros();
    encode_into(obs, &mut t.data)?;
    Ok(t)
}

/// Writes the planes of `obs` into `out` (length [`TENSOR_LEN`]), validating
/// first.
pub fn encode_into(obs: &RawObservation, out: &mut [f32]) -> Result<(), EncodeError> {
    use channel::*;
    validate(obs)?;
    if out.len() != TENSOR_LEN {
        return Err(EncodeError::BadLength(out.len()));
    }
    out.fill(0.0);
    let mut set = |ch: usize, r: usize, c: usize, v: f32| out[ch * PLANE + r * BOARD_SIZE + c] = v;
    let desir = desirability_map(obs);
    let kick = if obs.can_kick { 1.0 } else { 0.0 };
    for r in 0..BOARD_SIZE {
        for c in 0..BOARD_SIZE {
            let p = Position::new(r, c);
            set(board_class(obs, p), r, c, 1.0);
            if let Some(b) = obs.bomb(p) {
                set(BOMB_STRENGTH, r, c, b.blast_strength as f32);
                set(BOMB_LIFE, r, c, b.life as f32);
            }
            set(AMMO, r, c, obs.ammo as f32);
            set(BLAST_STRENGTH, r, c, obs.blast_strength as f32);
            set(CAN_KICK, r, c, kick);
            set(DESIRABILITY, r, c, desir[r][c] as f32);
        }
    }
    let slots = [
        (SELF_POS, obs.agent),
        (TEAMMATE_POS, obs.teammate),
        (ENEMY1_POS, obs.enemies[0]),
        (ENEMY2_POS, obs.enemies[1]),
    ];
    for (ch, id) in slots {
        if let Some(p) = obs.agents[id] {
            set(ch, p.r(), p.c(), 1.0);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{generate_board, Bomb, GameState};

    #[test]
    fn fresh_game_broadcast_and_position() {
        let s = generate_board(5);
        let t = encode(&s.observe(0).unwrap()).unwrap();
        assert!(t.plane(channel::AMMO).iter().all(|&v| v == 1.0));
        let own = t.plane(channel::SELF_POS);
        assert_eq!(own.iter().sum::<f32>(), 1.0);
        assert_eq!(t.get(channel::SELF_POS, 0, 0), 1.0);
        assert!(t.plane(channel::CAN_KICK).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn visible_bomb_planes() {
        let mut s = GameState::empty(0);
        s.bombs.push(Bomb {
            position: Position::new(2, 3),
            life: 7,
            blast_strength: 3,
            owner: 1,
            velocity: None,
        });
        let t = encode(&s.observe(0).unwrap()).unwrap();
        assert_eq!(t.get(channel::BOMB_STRENGTH, 2, 3), 3.0);
        assert_eq!(t.get(channel::BOMB_LIFE, 2, 3), 7.0);
        assert_eq!(t.get(channel::BOMB, 2, 3), 1.0);
        assert_eq!(t.plane(channel::BOMB_LIFE).iter().sum::<f32>(), 7.0);
    }

    #[test]
    fn desirability_codes() {
        let mut s = GameState::empty(0);
        s.items[1][1] = Some(PowerupKind::Kick);
        s.agents[1].position = Position::new(2, 2);
        s.agents[2].position = Position::new(3, 3);
        s.bombs.push(Bomb {
            position: Position::new(4, 4),
            life: 5,
            blast_strength: 2,
            owner: 0,
            velocity: None,
        });
        s.flames[4][4] = 1;
        s.board[0][3] = Cell::WoodenWall;
        s.board[0][4] = Cell::RigidWall;
        let d = desirability_map(&s.observe(0).unwrap());
        assert_eq!(d[1][1], desirability::POWERUP);
        assert_eq!(d[2][2], desirability::ENEMY);
        assert_eq!(d[3][3], desirability::TEAMMATE);
        assert_eq!(d[4][4], desirability::FLAMES);
        assert_eq!(d[0][3], desirability::WOODEN);
        assert_eq!(d[0][4], desirability::RIGID);
        assert_eq!(d[0][1], desirability::PASSAGE);
        assert_eq!(d[0][0], desirability::PASSAGE);
        assert_eq!(d[10][10], desirability::FOG);
    }

    #[test]
    fn rejects_inconsistent_observation() {
        let s = generate_board(1);
        let mut obs = s.observe(0).unwrap();
        obs.position = Position::new(9, 9);
        assert_eq!(
            encode(&obs),
            Err(EncodeError::BadPosition(Position::new(9, 9)))
        );
        let mut obs = s.observe(0).unwrap();
        obs.teammate = 1;
        assert!(matches!(encode(&obs), Err(EncodeError::BadIds { .. })));
        assert!(ObservationTensor::from_vec(vec![0.0; 10]).is_err());
    }
}
