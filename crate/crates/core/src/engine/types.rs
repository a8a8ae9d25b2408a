use core::fmt;

use serde::{Deserialize, Serialize};

/// Side length of the square board.
pub const BOARD_SIZE: usize = 11;
/// Game length after which a still-undecided game is a tie.
pub const MAX_TICKS: u32 = 800;
/// Ticks between bomb placement and explosion.
pub const BOMB_LIFE: u8 = 10;
/// Ticks a flame stays lethal.
pub const FLAME_LIFE: u8 = 2;
/// Chebyshev radius of an agent's view window.
pub const VIEW_RADIUS: usize = 5;
pub const INITIAL_BLAST_STRENGTH: u8 = 3;
pub const INITIAL_AMMO: u8 = 1;
pub const NUM_AGENTS: usize = 4;

pub type AgentId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cell {
    Passage,
    RigidWall,
    WoodenWall,
    /// Only ever produced by observations.
    Fog,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PowerupKind {
    ExtraBomb,
    IncrRange,
    Kick,
}

impl PowerupKind {
    pub const ALL: [PowerupKind; 3] = [Self::ExtraBomb, Self::IncrRange, Self::Kick];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Position {
    pub row: u8,
    pub col: u8,
}

impl Position {
    pub const fn new(row: usize, col: usize) -> Self {
        Self {
            row: row as u8,
            col: col as u8,
        }
    }

    #[inline]
    pub fn r(self) -> usize {
        self.row as usize
    }

    #[inline]
    pub fn c(self) -> usize {
        self.col as usize
    }

    /// Neighbouring cell in `dir`, or `None` when it falls off the board.
    #[inline]
    pub fn offset(self, dir: Direction) -> Option<Position> {
        let (dr, dc) = dir.delta();
        let r = self.row as i32 + dr;
        let c = self.col as i32 + dc;
        if (0..BOARD_SIZE as i32).contains(&r) && (0..BOARD_SIZE as i32).contains(&c) {
            Some(Position::new(r as usize, c as usize))
        } else {
            None
        }
    }

    pub fn chebyshev(self, other: Position) -> usize {
        let dr = (self.row as i32 - other.row as i32).unsigned_abs();
        let dc = (self.col as i32 - other.col as i32).unsigned_abs();
        dr.max(dc) as usize
    }

    pub fn manhattan(self, other: Position) -> usize {
        let dr = (self.row as i32 - other.row as i32).unsigned_abs();
        let dc = (self.col as i32 - other.col as i32).unsigned_abs();
        (dr + dc) as usize
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Up,
    Down,
    Left,
    Right,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Self::Up, Self::Down, Self::Left, Self::Right];

    #[inline]
    pub fn delta(self) -> (i32, i32) {
        match self {
            Direction::Up => (-1, 0),
            Direction::Down => (1, 0),
            Direction::Left => (0, -1),
            Direction::Right => (0, 1),
        }
    }

    pub fn action(self) -> Action {
        match self {
            Direction::Up => Action::Up,
            Direction::Down => Action::Down,
            Direction::Left => Action::Left,
            Direction::Right => Action::Right,
        }
    }
}

/// The six discrete actions, numbered as in the dataset and replay formats.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum Action {
    Stop = 0,
    Up = 1,
    Down = 2,
    Left = 3,
    Right = 4,
    PlaceBomb = 5,
}

impl Action {
    pub const COUNT: usize = 6;
    pub const ALL: [Action; 6] = [
        Action::Stop,
        Action::Up,
        Action::Down,
        Action::Left,
        Action::Right,
        Action::PlaceBomb,
    ];
    pub const MOVES: [Action; 4] = [Action::Up, Action::Down, Action::Left, Action::Right];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Action> {
        Self::ALL.get(i).copied()
    }

    pub fn direction(self) -> Option<Direction> {
        match self {
            Action::Up => Some(Direction::Up),
            Action::Down => Some(Direction::Down),
            Action::Left => Some(Direction::Left),
            Action::Right => Some(Direction::Right),
            Action::Stop | Action::PlaceBomb => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AgentState {
    pub id: AgentId,
    pub position: Position,
    pub alive: bool,
    pub ammo: u8,
    /// Bombs this agent may have on the board at once.
    pub ammo_capacity: u8,
    pub blast_strength: u8,
    pub can_kick: bool,
}

impl AgentState {
    pub fn spawn(id: AgentId) -> Self {
        Self {
            id,
            position: spawn_corner(id),
            alive: true,
            ammo: INITIAL_AMMO,
            ammo_capacity: INITIAL_AMMO,
            blast_strength: INITIAL_BLAST_STRENGTH,
            can_kick: false,
        }
    }

    pub fn team(&self) -> Team {
        team_of(self.id)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Team {
    Zero,
    One,
}

impl Team {
    pub fn members(self) -> [AgentId; 2] {
        match self {
            Team::Zero => [0, 2],
            Team::One => [1, 3],
        }
    }

    pub fn other(self) -> Team {
        match self {
            Team::Zero => Team::One,
            Team::One => Team::Zero,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Team::Zero => 0,
            Team::One => 1,
        }
    }
}

pub fn team_of(id: AgentId) -> Team {
    if id % 2 == 0 {
        Team::Zero
    } else {
        Team::One
    }
}

pub fn teammate_of(id: AgentId) -> AgentId {
    (id + 2) % NUM_AGENTS
}

pub fn enemies_of(id: AgentId) -> [AgentId; 2] {
    team_of(id).other().members()
}

/// Team 0 holds (0,0) and (10,10); team 1 holds (0,10) and (10,0).
pub fn spawn_corner(id: AgentId) -> Position {
    const LAST: usize = BOARD_SIZE - 1;
    match id {
        0 => Position::new(0, 0),
        1 => Position::new(0, LAST),
        2 => Position::new(LAST, LAST),
        _ => Position::new(LAST, 0),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bomb {
    pub position: Position,
    pub life: u8,
    pub blast_strength: u8,
    pub owner: AgentId,
    pub velocity: Option<Direction>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flame {
    pub position: Position,
    pub remaining_life: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Team0Wins,
    Team1Wins,
    Tie,
}

impl Outcome {
    pub fn winner(self) -> Option<Team> {
        match self {
            Outcome::Team0Wins => Some(Team::Zero),
            Outcome::Team1Wins => Some(Team::One),
            Outcome::Tie => None,
        }
    }
}

/// What happened during one step, in enough detail to audit a replay.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepEvents {
    pub deaths: alloc::vec::Vec<AgentId>,
    pub bombs_placed: alloc::vec::Vec<(AgentId, Position)>,
    pub explosions: alloc::vec::Vec<Position>,
    pub pickups: alloc::vec::Vec<(AgentId, PowerupKind)>,
    pub outcome: Option<Outcome>,
}
