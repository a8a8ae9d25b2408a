use alloc::vec::Vec;

use super::state::GameState;
use super::types::*;
use super::EngineError;

/// Cells covered by a blast of `strength` from `origin`: the origin plus up to
/// `strength - 1` cells per direction. A rigid wall stops the arm before it; a
/// wooden wall takes the flame and stops the arm.
pub fn blast_cross<F>(origin: Position, strength: u8, cell_at: F, out: &mut Vec<Position>)
where
    F: Fn(Position) -> Cell,
{
    out.push(origin);
    for dir in Direction::ALL {
        let mut p = origin;
        for _ in 1..strength {
            match p.offset(dir) {
                None => break,
                Some(n) => {
                    p = n;
                    match cell_at(p) {
                        Cell::RigidWall => break,
                        Cell::WoodenWall => {
                            out.push(p);
                            break;
                        }
                        Cell::Passage | Cell::Fog => out.push(p),
                    }
                }
            }
        }
    }
}

impl GameState {
    /// Explodes every bomb whose life ran out or that sits on a flame, then
    /// chains through bombs caught by the new flames until nothing else goes
    /// off. All blasts of one call see the walls as they were before it.
    /// Returns the positions of the bombs that exploded.
    pub fn resolve_explosions(&mut self) -> Vec<Position> {
        let n = self.bombs.len();
        let mut exploded = alloc::vec![false; n];
        let mut queue: Vec<usize> = (0..n)
            .filter(|&i| self.bombs[i].life == 0 || self.flame_at(self.bombs[i].position))
            .collect();
        if queue.is_empty() {
            return Vec::new();
        }

        let board = self.board;
        let mut burning = [[false; BOARD_SIZE]; BOARD_SIZE];
        let mut cross = Vec::with_capacity(16);
        while let Some(i) = queue.pop() {
            if exploded[i] {
                continue;
            }
            exploded[i] = true;
            cross.clear();
            let b = self.bombs[i];
            blast_cross(
                b.position,
                b.blast_strength,
                |p| board[p.r()][p.c()],
                &mut cross,
            );
            for &p in &cross {
                burning[p.r()][p.c()] = true;
            }
            for (j, other) in self.bombs.iter().enumerate() {
                if !exploded[j] && burning[other.position.r()][other.position.c()] {
                    queue.push(j);
                }
            }
        }

        for r in 0..BOARD_SIZE {
            for c in 0..BOARD_SIZE {
                if burning[r][c] {
                    self.flames[r][c] = FLAME_LIFE;
                    if self.board[r][c] == Cell::WoodenWall {
                        self.board[r][c] = Cell::Passage;
                    }
                }
            }
        }

        let mut positions = Vec::new();
        let mut kept = Vec::with_capacity(n);
        for (i, b) in self.bombs.drain(..).enumerate() {
            if exploded[i] {
                positions.push(b.position);
                let owner = &mut self.agents[b.owner];
                owner.ammo = owner.ammo.saturating_add(1).min(owner.ammo_capacity);
            } else {
                kept.push(b);
            }
        }
        self.bombs = kept;
        positions
    }

    /// Outcome if the game is over.
    pub fn terminal_status(&self) -> Option<Outcome> {
        let zero = self.team_alive(Team::Zero);
        let one = self.team_alive(Team::One);
        match (zero, one) {
            (0, 0) => Some(Outcome::Tie),
            (_, 0) => Some(Outcome::Team0Wins),
            (0, _) => Some(Outcome::Team1Wins),
            _ if self.tick >= self.max_ticks => Some(Outcome::Tie),
            _ => None,
        }
    }

    pub fn is_terminal(&self) -> bool {
        self.terminal_status().is_some()
    }

    /// Value-style step: returns the successor and leaves `self` untouched.
    pub fn step(
        &self,
        actions: [Action; NUM_AGENTS],
    ) -> Result<(GameState, StepEvents), EngineError> {
        let mut next = self.clone();
        let events = next.step_mut(actions)?;
        Ok((next, events))
    }

    /// Advances the game by one tick. Actions of dead agents are ignored.
    pub fn step_mut(&mut self, actions: [Action; NUM_AGENTS]) -> Result<StepEvents, EngineError> {
        if self.is_terminal() {
            return Err(EngineError::Terminal);
        }
        let mut events = StepEvents::default();

        // 1. bomb clocks and sliding bombs
        for b in &mut self.bombs {
            b.life = b.life.saturating_sub(1);
        }
        self.slide_bombs();

        // 2-3. movement
        self.resolve_movement(&actions);

        // 4. placement
        for id in 0..NUM_AGENTS {
            let a = self.agents[id];
            if a.alive
                && actions[id] == Action::PlaceBomb
                && a.ammo > 0
                && self.bomb_at(a.position).is_none()
            {
                self.bombs.push(Bomb {
                    position: a.position,
                    life: BOMB_LIFE,
                    blast_strength: a.blast_strength,
                    owner: id,
                    velocity: None,
                });
                self.agents[id].ammo -= 1;
                events.bombs_placed.push((id, a.position));
            }
        }

        // 5. explosions
        events.explosions = self.resolve_explosions();

        // 6. flame deaths
        for a in &mut self.agents {
            if a.alive && self.flames[a.position.r()][a.position.c()] > 0 {
                a.alive = false;
                events.deaths.push(a.id);
            }
        }

        // 7. flame decay
        for row in &mut self.flames {
            for f in row {
                *f = f.saturating_sub(1);
            }
        }

        // 8. pickups
        for a in &mut self.agents {
            if !a.alive {
                continue;
            }
            let (r, c) = (a.position.r(), a.position.c());
            if self.board[r][c] != Cell::Passage {
                continue;
            }
            if let Some(kind) = self.items[r][c].take() {
                match kind {
                    PowerupKind::ExtraBomb => {
                        a.ammo = a.ammo.saturating_add(1);
                        a.ammo_capacity = a.ammo_capacity.saturating_add(1);
                    }
                    PowerupKind::IncrRange => a.blast_strength = a.blast_strength.saturating_add(1),
                    PowerupKind::Kick => a.can_kick = true,
                }
                events.pickups.push((a.id, kind));
            }
        }

        self.tick += 1;
        events.outcome = self.terminal_status();
        Ok(events)
    }

    fn slide_bombs(&mut self) {
        if self.bombs.iter().all(|b| b.velocity.is_none()) {
            return;
        }
        let targets: Vec<Option<Position>> = self
            .bombs
            .iter()
            .map(|b| {
                let dir = b.velocity?;
                let t = b.position.offset(dir)?;
                let blocked = self.cell(t) != Cell::Passage
                    || self.bombs.iter().any(|o| o.position == t)
                    || self.alive_agent_at(t).is_some();
                (!blocked).then_some(t)
            })
            .collect();
        for i in 0..self.bombs.len() {
            if self.bombs[i].velocity.is_none() {
                continue;
            }
            let clash = targets[i].is_none()
                || targets
                    .iter()
                    .enumerate()
                    .any(|(j, t)| j != i && *t == targets[i]);
            match targets[i] {
                Some(t) if !clash => self.bombs[i].position = t,
                _ => self.bombs[i].velocity = None,
            }
        }
    }

    fn resolve_movement(&mut self, actions: &[Action; NUM_AGENTS]) {
        let origin: [Position; NUM_AGENTS] = core::array::from_fn(|i| self.agents[i].position);
        let mut intended = origin;
        let mut kicks: [Option<(usize, Direction)>; NUM_AGENTS] = [None; NUM_AGENTS];

        for id in 0..NUM_AGENTS {
            let a = &self.agents[id];
            if !a.alive {
                continue;
            }
            let Some(dir) = actions[id].direction() else {
                continue;
            };
            let Some(target) = a.position.offset(dir) else {
                continue;
            };
            if self.cell(target) != Cell::Passage {
                continue;
            }
            if let Some(bi) = self.bombs.iter().position(|b| b.position == target) {
                if a.can_kick && self.bombs[bi].velocity.is_none() {
                    kicks[id] = Some((bi, dir));
                }
                continue;
            }
            intended[id] = target;
        }

        // A bomb kicked by more than one agent in the same tick stays put.
        for id in 0..NUM_AGENTS {
            if let Some((bi, dir)) = kicks[id] {
                let shared = kicks
                    .iter()
                    .enumerate()
                    .any(|(j, k)| j != id && matches!(k, Some((bj, _)) if *bj == bi));
                if !shared {
                    self.bombs[bi].velocity = Some(dir);
                }
            }
        }

        let alive: [bool; NUM_AGENTS] = core::array::from_fn(|i| self.agents[i].alive);
        loop {
            let mut revert = [false; NUM_AGENTS];
            for i in 0..NUM_AGENTS {
                if !alive[i] || intended[i] == origin[i] {
                    continue;
                }
                for j in 0..NUM_AGENTS {
                    if i == j || !alive[j] {
                        continue;
                    }
                    let same_cell = intended[j] == intended[i];
                    let swap = intended[j] == origin[i] && intended[i] == origin[j];
                    if same_cell || swap {
                        revert[i] = true;
                    }
                }
            }
            if !revert.iter().any(|&r| r) {
                break;
            }
            for i in 0..NUM_AGENTS {
                if revert[i] {
                    intended[i] = origin[i];
                }
            }
        }

        for i in 0..NUM_AGENTS {
            self.agents[i].position = intended[i];
        }
    }
}
