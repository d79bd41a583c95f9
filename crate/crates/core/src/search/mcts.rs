//! Open-loop UCB tree search.
//!
//! Nodes are keyed by the action sequence from the root. Random stages
//! between tree levels are re-sampled on every iteration instead of being
//! branched on, so the actions legal below a node can change from one
//! iteration to the next; selection only considers children whose action is
//! legal in the current sample. The root expands its children in legal
//! order. Deeper nodes expand the untried action the playout policy would
//! pick (the expert's choice, or a uniform draw), so that early iterations
//! continue the way a playout would.
//!
//! The k-th iteration through a root child draws its randomness from the
//! same seed for every child, as in flat search.

use super::playout::{advance_to_branch, playout_rng, rollout};
use super::{ucb_score, SearchConfig, SearchReport};
use rand::Rng;

use crate::agents::{expert_action, DecisionPolicy, PlayoutPolicy};
use crate::game::{Action, GameRng, GameState};

#[derive(Clone, Debug, PartialEq)]
pub struct SearchNode {
    /// Action leading here; `None` at the root.
    pub action: Option<Action>,
    pub wins: u32,
    pub visits: u32,
    /// Indices into the tree arena, in creation order.
    pub children: Vec<usize>,
    pub depth: usize,
}

#[derive(Clone, Debug, Default)]
pub struct SearchTree {
    pub nodes: Vec<SearchNode>,
    pub playouts: u64,
}

impl SearchTree {
    pub fn root(&self) -> &SearchNode {
        &self.nodes[0]
    }

    /// Checks `wins <= visits` everywhere and that no node's children were
    /// visited more often than the node itself.
    pub fn check_consistency(&self) -> Result<(), String> {
        for (i, n) in self.nodes.iter().enumerate() {
            if n.wins > n.visits {
                return Err(format!("node {i}: wins {} > visits {}", n.wins, n.visits));
            }
            let child_visits: u32 = n.children.iter().map(|&c| self.nodes[c].visits).sum();
            if child_visits > n.visits {
                return Err(format!(
                    "node {i}: children visited {child_visits} > {}",
                    n.visits
                ));
            }
        }
        Ok(())
    }
}

/// Agent 4: MCTS with UCB selection.
#[derive(Clone, Debug)]
pub struct MctsUcb {
    pub config: SearchConfig,
}

impl MctsUcb {
    pub fn new(config: SearchConfig) -> Self {
        Self { config }
    }

    pub fn search(&self, state: &GameState, legals: &[Action], rng: &mut GameRng) -> SearchReport {
        let (action, tree) = self.search_tree(state, legals, rng, |_| {});
        let root = tree.root();
        SearchReport {
            action,
            playouts: tree.playouts,
            children: root
                .children
                .iter()
                .map(|&c| {
                    let n = &tree.nodes[c];
                    (
                        n.action.clone().expect("child has an action"),
                        n.wins,
                        n.visits,
                    )
                })
                .collect(),
        }
    }

    /// Runs the search and returns the chosen action with the final tree.
    /// `after_iteration` sees the tree after every iteration.
    pub fn search_tree(
        &self,
        state: &GameState,
        legals: &[Action],
        rng: &mut GameRng,
        mut after_iteration: impl FnMut(&SearchTree),
    ) -> (Action, SearchTree) {
        assert!(!legals.is_empty(), "search needs at least one legal action");
        let mut tree = SearchTree {
            nodes: vec![SearchNode {
                action: None,
                wins: 0,
                visits: 0,
                children: Vec::new(),
                depth: 0,
            }],
            playouts: 0,
        };
        if legals.len() == 1 {
            return (legals[0].clone(), tree);
        }
        let base: u64 = rng.gen();
        for _ in 0..self.config.playout_budget {
            self.iterate(&mut tree, state, legals, base);
            after_iteration(&tree);
        }
        let root = tree.root();
        let mut best = root.children[0];
        for &c in &root.children[1..] {
            let (n, b) = (&tree.nodes[c], &tree.nodes[best]);
            if (n.visits, n.wins) > (b.visits, b.wins) {
                best = c;
            }
        }
        let action = tree.nodes[best]
            .action
            .clone()
            .expect("child has an action");
        (action, tree)
    }

    fn iterate(&self, tree: &mut SearchTree, root: &GameState, root_legals: &[Action], base: u64) {
        // Root legality never changes between iterations, so the root child
        // is fixed before anything random happens.
        let first = self.root_child(tree, root_legals);
        let fresh = tree.nodes[first].visits == 0 && tree.nodes[first].children.is_empty();
        let mut rng = playout_rng(base, tree.nodes[first].visits);
        let mut sample = root.clone();
        sample.determinize(&mut rng);
        let action = tree.nodes[first]
            .action
            .clone()
            .expect("child has an action");
        sample.apply(&action).expect("root actions are legal");
        advance_to_branch(&mut sample, &mut rng);
        let mut path = vec![0usize, first];
        let mut node = first;
        // A freshly expanded root child goes straight to its playout.
        while !fresh && !sample.is_over() {
            let depth = tree.nodes[node].depth;
            if self.config.max_depth.is_some_and(|max| depth >= max) {
                break;
            }
            let legals = sample
                .legal_actions()
                .expect("tree nodes sit at decision stages");
            let untried: Vec<&Action> = legals
                .iter()
                .filter(|a| {
                    !tree.nodes[node]
                        .children
                        .iter()
                        .any(|&c| tree.nodes[c].action.as_ref() == Some(*a))
                })
                .collect();
            if !untried.is_empty() {
                let action = self.expansion_choice(&sample, &untried, &mut rng);
                let child = Self::add_child(tree, node, action.clone());
                sample.apply(action).expect("expanded action is legal");
                advance_to_branch(&mut sample, &mut rng);
                path.push(child);
                break;
            }
            let Some(chosen) = self.select(tree, node, &legals) else {
                break;
            };
            let action = tree.nodes[chosen]
                .action
                .clone()
                .expect("child has an action");
            sample.apply(&action).expect("selected action is legal");
            advance_to_branch(&mut sample, &mut rng);
            path.push(chosen);
            node = chosen;
        }
        let outcome = rollout(
            &mut sample,
            self.config.playout,
            &mut rng,
            self.config.round_cap,
        );
        tree.playouts += 1;
        let win = u32::from(outcome.is_win());
        for &n in &path {
            tree.nodes[n].visits += 1;
            tree.nodes[n].wins += win;
        }
    }

    /// Expands the first untried root action in legal order, or selects
    /// among the root's children once all are expanded.
    fn root_child(&self, tree: &mut SearchTree, legals: &[Action]) -> usize {
        let untried = legals.iter().find(|a| {
            !tree.nodes[0]
                .children
                .iter()
                .any(|&c| tree.nodes[c].action.as_ref() == Some(*a))
        });
        match untried {
            Some(action) => Self::add_child(tree, 0, action.clone()),
            None => self.select(tree, 0, legals).expect("root has children"),
        }
    }

    fn add_child(tree: &mut SearchTree, parent: usize, action: Action) -> usize {
        let child = tree.nodes.len();
        tree.nodes.push(SearchNode {
            action: Some(action),
            wins: 0,
            visits: 0,
            children: Vec::new(),
            depth: tree.nodes[parent].depth + 1,
        });
        tree.nodes[parent].children.push(child);
        child
    }

    /// Child of `node` with the highest UCB score among those whose action
    /// is in `legals`; the earliest on ties.
    fn select(&self, tree: &SearchTree, node: usize, legals: &[Action]) -> Option<usize> {
        let parent_visits = tree.nodes[node].visits.max(1);
        let mut best: Option<(usize, f64)> = None;
        for &c in &tree.nodes[node].children {
            let n = &tree.nodes[c];
            if !legals.contains(n.action.as_ref().expect("child has an action")) {
                continue;
            }
            let score = ucb_score(n.wins, n.visits, parent_visits, self.config.exploration);
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((c, score));
            }
        }
        best.map(|(c, _)| c)
    }

    fn expansion_choice<'a>(
        &self,
        state: &GameState,
        untried: &[&'a Action],
        rng: &mut GameRng,
    ) -> &'a Action {
        match self.config.playout {
            PlayoutPolicy::Expert => {
                let wanted = expert_action(state);
                untried
                    .iter()
                    .copied()
                    .find(|a| **a == wanted)
                    .unwrap_or(untried[0])
            }
            PlayoutPolicy::Random => untried[rng.gen_range(0..untried.len())],
        }
    }
}

impl DecisionPolicy for MctsUcb {
    fn decide(&self, state: &GameState, legals: &[Action], rng: &mut GameRng) -> Action {
        self.search(state, legals, rng).action
    }
}
