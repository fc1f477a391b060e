//! The matching-state machine.
//!
//! A [`MatchingState`] is a stack of matching atoms plus the bindings made so
//! far. [`process_matching_state`] pops the top atom and returns the next
//! states; a state with an empty stack is a match. Two search drivers sit on
//! top of the step function:
//!
//! * [`DepthFirst`]: successors of a state are explored before its later
//!   siblings, so results come out in the order of a left-to-right search.
//!   Used by [`match_all`] and [`match_first`].
//! * [`Dovetail`]: a FIFO round-robin where each turn advances one pending
//!   state or pulls one more successor from a pending enumeration. Every
//!   result at finite depth is reached even if other branches never end.
//!   Used by [`stream_match_all`].

use std::collections::VecDeque;
use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use crate::error::MatchError;
use crate::matcher::{AtomLists, Matcher, MatchingAtom};
use crate::pattern::{extract_pattern_variables, validate_pattern, BindingEnv, Pattern, PatternKind, ValidationError};
use crate::value::{Symbol, Value};

// ---------------------------------------------------------------------------
// Matching states
// ---------------------------------------------------------------------------

#[derive(Clone, Default)]
struct Stack {
    head: Option<Arc<StackNode>>,
    len: usize,
}

struct StackNode {
    atom: MatchingAtom,
    next: Option<Arc<StackNode>>,
}

impl Stack {
    fn push(&self, atom: MatchingAtom) -> Stack {
        Stack {
            head: Some(Arc::new(StackNode {
                atom,
                next: self.head.clone(),
            })),
            len: self.len + 1,
        }
    }

    /// `atoms` on top of `self`, `atoms[0]` topmost.
    fn push_all(&self, atoms: Vec<MatchingAtom>) -> Stack {
        atoms.into_iter().rev().fold(self.clone(), |s, a| s.push(a))
    }

    fn pop(&self) -> Option<(&MatchingAtom, Stack)> {
        self.head.as_deref().map(|node| {
            (
                &node.atom,
                Stack {
                    head: node.next.clone(),
                    len: self.len - 1,
                },
            )
        })
    }

    fn iter(&self) -> impl Iterator<Item = &MatchingAtom> {
        let mut cur = self.head.as_deref();
        std::iter::from_fn(move || {
            let node = cur?;
            cur = node.next.as_deref();
            Some(&node.atom)
        })
    }

    fn push_bottom(&self, atom: MatchingAtom) -> Stack {
        let mut atoms: Vec<MatchingAtom> = self.iter().cloned().collect();
        atoms.push(atom);
        Stack::default().push_all(atoms)
    }
}

#[derive(Clone)]
pub struct MatchingState {
    stack: Stack,
    env: BindingEnv,
}

impl MatchingState {
    /// `atoms[0]` ends up on top of the stack.
    pub fn new(atoms: Vec<MatchingAtom>, env: BindingEnv) -> Self {
        MatchingState {
            stack: Stack::default().push_all(atoms),
            env,
        }
    }

    /// The single-atom state a match starts from.
    pub fn initial(pattern: Pattern, matcher: Matcher, target: Value) -> Self {
        MatchingState::new(vec![MatchingAtom::new(pattern, matcher, target)], BindingEnv::new())
    }

    pub fn is_final(&self) -> bool {
        self.stack.len == 0
    }

    pub fn stack_len(&self) -> usize {
        self.stack.len
    }

    /// Atoms from top to bottom.
    pub fn atoms(&self) -> Vec<MatchingAtom> {
        self.stack.iter().cloned().collect()
    }

    pub fn env(&self) -> &BindingEnv {
        &self.env
    }

    pub fn into_env(self) -> BindingEnv {
        self.env
    }
}

impl fmt::Display for MatchingState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(MState {")?;
        for (i, atom) in self.stack.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{atom}")?;
        }
        f.write_str("} {")?;
        for (i, v) in self.env.values().iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("})")
    }
}

impl fmt::Debug for MatchingState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// ---------------------------------------------------------------------------
// One reduction step
// ---------------------------------------------------------------------------

/// Lazily produced successors of one state.
pub struct Successors(SuccessorsInner);

enum SuccessorsInner {
    Ready(std::vec::IntoIter<MatchingState>),
    Lists {
        lists: AtomLists,
        rest: Stack,
        env: BindingEnv,
        atom: MatchingAtom,
    },
}

impl Successors {
    fn none() -> Self {
        Successors(SuccessorsInner::Ready(Vec::new().into_iter()))
    }

    fn one(state: MatchingState) -> Self {
        Successors(SuccessorsInner::Ready(vec![state].into_iter()))
    }

    fn ready(states: Vec<MatchingState>) -> Self {
        Successors(SuccessorsInner::Ready(states.into_iter()))
    }
}

impl Iterator for Successors {
    type Item = Result<MatchingState, MatchError>;

    fn next(&mut self) -> Option<Self::Item> {
        match &mut self.0 {
            SuccessorsInner::Ready(states) => states.next().map(Ok),
            SuccessorsInner::Lists { lists, rest, env, atom } => match lists.next()? {
                Ok(atoms) => Some(Ok(MatchingState {
                    stack: rest.push_all(atoms),
                    env: env.clone(),
                })),
                Err(e) => Some(Err(e.in_atom(|| atom.to_string()))),
            },
        }
    }
}

/// One reduction step, with successors produced on demand.
pub fn successors(state: &MatchingState) -> Result<Successors, MatchError> {
    let (atom, rest) = state.stack.pop().expect("successors of a final state");
    step(atom, rest, &state.env).map_err(|e| e.in_atom(|| atom.to_string()))
}

/// One reduction step: pops the top atom and returns every next state.
pub fn process_matching_state(state: &MatchingState) -> Result<Vec<MatchingState>, MatchError> {
    successors(state)?.collect()
}

fn step(atom: &MatchingAtom, rest: Stack, env: &BindingEnv) -> Result<Successors, MatchError> {
    let MatchingAtom {
        pattern,
        matcher,
        target,
    } = atom;
    let with = |p: &Pattern| MatchingAtom::new(p.clone(), matcher.clone(), target.clone());
    match pattern.kind() {
        PatternKind::And(ps) => Ok(Successors::one(MatchingState {
            stack: rest.push_all(ps.iter().map(with).collect()),
            env: env.clone(),
        })),
        PatternKind::Or(ps) => Ok(Successors::ready(
            ps.iter()
                .map(|p| MatchingState {
                    stack: rest.push(with(p)),
                    env: env.clone(),
                })
                .collect(),
        )),
        PatternKind::Not(q) => {
            let probe = MatchingState {
                stack: Stack::default().push(with(q)),
                env: env.clone(),
            };
            if process_matching_states_first(vec![probe])?.is_some() {
                Ok(Successors::none())
            } else {
                Ok(Successors::one(MatchingState {
                    stack: rest,
                    env: env.clone(),
                }))
            }
        }
        PatternKind::Later(q) => Ok(Successors::one(MatchingState {
            stack: rest.push_bottom(with(q)),
            env: env.clone(),
        })),
        _ => match matcher {
            Matcher::Something => match pattern.kind() {
                PatternKind::Var(x) => Ok(Successors::one(MatchingState {
                    stack: rest,
                    env: env.bind(x.clone(), target.clone())?,
                })),
                PatternKind::Wildcard => Ok(Successors::one(MatchingState {
                    stack: rest,
                    env: env.clone(),
                })),
                _ => Err(MatchError::SomethingPattern {
                    pattern: pattern.to_string(),
                }),
            },
            Matcher::Custom(_) => {
                let lists = match pattern.kind() {
                    PatternKind::Value(vp) if vp.resolved().is_none() => {
                        let value = vp.eval(env)?;
                        matcher.apply(&Pattern::value(vp.resolve(value)), target)?
                    }
                    _ => matcher.apply(pattern, target)?,
                };
                Ok(Successors(SuccessorsInner::Lists {
                    lists,
                    rest,
                    env: env.clone(),
                    atom: atom.clone(),
                }))
            }
        },
    }
}

// ---------------------------------------------------------------------------
// Depth-first search
// ---------------------------------------------------------------------------

/// Cooperative cancellation for long searches.
#[derive(Clone, Default)]
pub struct CancelToken(Arc<AtomicBool>);

impl CancelToken {
    pub fn new() -> Self {
        CancelToken::default()
    }

    pub fn cancel(&self) {
        self.0.store(true, Ordering::Relaxed);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(Ordering::Relaxed)
    }
}

const CANCEL_CHECK_INTERVAL: u32 = 1024;

/// Depth-first enumeration of match results.
pub struct DepthFirst {
    frames: Vec<Successors>,
    cancel: Option<CancelToken>,
    ticks: u32,
}

impl DepthFirst {
    pub fn new(states: Vec<MatchingState>) -> Self {
        DepthFirst {
            frames: vec![Successors::ready(states)],
            cancel: None,
            ticks: 0,
        }
    }

    pub fn with_cancel(mut self, token: CancelToken) -> Self {
        self.cancel = Some(token);
        self
    }

    fn fail(&mut self, e: MatchError) -> Option<Result<BindingEnv, MatchError>> {
        self.frames.clear();
        Some(Err(e))
    }
}

impl Iterator for DepthFirst {
    type Item = Result<BindingEnv, MatchError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if let Some(token) = &self.cancel {
                self.ticks += 1;
                if self.ticks >= CANCEL_CHECK_INTERVAL {
                    self.ticks = 0;
                    if token.is_cancelled() {
                        return self.fail(MatchError::Cancelled);
                    }
                }
            }
            let top = self.frames.last_mut()?;
            match top.next() {
                None => {
                    self.frames.pop();
                }
                Some(Err(e)) => return self.fail(e),
                Some(Ok(state)) if state.is_final() => return Some(Ok(state.env)),
                Some(Ok(state)) => match successors(&state) {
                    Ok(next) => self.frames.push(next),
                    Err(e) => return self.fail(e),
                },
            }
        }
    }
}

/// All results, in depth-first discovery order.
pub fn process_matching_states_all(states: Vec<MatchingState>) -> Result<Vec<BindingEnv>, MatchError> {
    DepthFirst::new(states).collect()
}

/// The first result in depth-first order, without exploring further.
pub fn process_matching_states_first(states: Vec<MatchingState>) -> Result<Option<BindingEnv>, MatchError> {
    DepthFirst::new(states).next().transpose()
}

/// Every way `target` matches `pattern` under `matcher`.
pub fn gen_match_results(pattern: &Pattern, matcher: &Matcher, target: &Value) -> Result<Vec<BindingEnv>, MatchError> {
    validate_pattern(pattern)?;
    process_matching_states_all(vec![MatchingState::initial(
        pattern.clone(),
        matcher.clone(),
        target.clone(),
    )])
}

// ---------------------------------------------------------------------------
// Fair search for infinite result sets
// ---------------------------------------------------------------------------

enum Task {
    State(MatchingState),
    Branch(Successors),
}

/// Round-robin enumeration of match results.
pub struct Dovetail {
    queue: VecDeque<Task>,
}

impl Dovetail {
    pub fn new(states: Vec<MatchingState>) -> Self {
        Dovetail {
            queue: states.into_iter().map(Task::State).collect(),
        }
    }
}

impl Iterator for Dovetail {
    type Item = Result<BindingEnv, MatchError>;

    fn next(&mut self) -> Option<Self::Item> {
        while let Some(task) = self.queue.pop_front() {
            match task {
                Task::State(state) if state.is_final() => return Some(Ok(state.env)),
                Task::State(state) => match successors(&state) {
                    Ok(next) => self.queue.push_back(Task::Branch(next)),
                    Err(e) => {
                        self.queue.clear();
                        return Some(Err(e));
                    }
                },
                Task::Branch(mut pending) => match pending.next() {
                    None => {}
                    Some(Ok(state)) => {
                        self.queue.push_back(Task::State(state));
                        self.queue.push_back(Task::Branch(pending));
                    }
                    Some(Err(e)) => {
                        self.queue.clear();
                        return Some(Err(e));
                    }
                },
            }
        }
        None
    }
}

// ---------------------------------------------------------------------------
// match-all / match-first
// ---------------------------------------------------------------------------

pub type ClauseBody = Arc<dyn Fn(&[Value]) -> Result<Value, MatchError> + Send + Sync>;

/// A pattern and the body evaluated for each of its matches. The body
/// receives the values of the pattern variables in
/// [`extract_pattern_variables`] order.
#[derive(Clone)]
pub struct MatchClause {
    pattern: Pattern,
    vars: Arc<[Symbol]>,
    body: ClauseBody,
}

impl MatchClause {
    pub fn new<F>(pattern: Pattern, body: F) -> Result<Self, ValidationError>
    where
        F: Fn(&[Value]) -> Result<Value, MatchError> + Send + Sync + 'static,
    {
        validate_pattern(&pattern)?;
        let vars = extract_pattern_variables(&pattern).into();
        Ok(MatchClause {
            pattern,
            vars,
            body: Arc::new(body),
        })
    }

    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    pub fn variables(&self) -> &[Symbol] {
        &self.vars
    }

    /// Values of the clause's variables in `env`, in parameter order.
    pub fn result_vector(&self, env: &BindingEnv) -> Result<Vec<Value>, MatchError> {
        self.vars
            .iter()
            .map(|x| env.get(x).cloned().ok_or_else(|| MatchError::MissingResultVariable(x.clone())))
            .collect()
    }

    pub fn apply(&self, env: &BindingEnv) -> Result<Value, MatchError> {
        let args = self.result_vector(env)?;
        (self.body)(&args)
    }

    fn initial(&self, matcher: &Matcher, target: &Value) -> MatchingState {
        MatchingState::initial(self.pattern.clone(), matcher.clone(), target.clone())
    }
}

impl fmt::Debug for MatchClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} ...]", self.pattern)
    }
}

/// Body values for every match of every clause, clause by clause.
pub fn match_all(target: &Value, matcher: &Matcher, clauses: &[MatchClause]) -> Result<Vec<Value>, MatchError> {
    match_all_cancellable(target, matcher, clauses, None)
}

pub fn match_all_cancellable(
    target: &Value,
    matcher: &Matcher,
    clauses: &[MatchClause],
    cancel: Option<&CancelToken>,
) -> Result<Vec<Value>, MatchError> {
    let mut out = Vec::new();
    for clause in clauses {
        let mut search = DepthFirst::new(vec![clause.initial(matcher, target)]);
        if let Some(token) = cancel {
            search = search.with_cancel(token.clone());
        }
        for env in search {
            out.push(clause.apply(&env?)?);
        }
    }
    Ok(out)
}

/// Body value of the first clause that matches, for its first match.
pub fn match_first(target: &Value, matcher: &Matcher, clauses: &[MatchClause]) -> Result<Option<Value>, MatchError> {
    for clause in clauses {
        if let Some(env) = process_matching_states_first(vec![clause.initial(matcher, target)])? {
            return clause.apply(&env).map(Some);
        }
    }
    Ok(None)
}

/// Body values of a clause produced on demand by the fair search. The search
/// tree may be infinite.
pub fn stream_match_all(target: &Value, matcher: &Matcher, clause: &MatchClause) -> StreamMatches {
    StreamMatches {
        search: Dovetail::new(vec![clause.initial(matcher, target)]),
        clause: clause.clone(),
        done: false,
    }
}

pub struct StreamMatches {
    search: Dovetail,
    clause: MatchClause,
    done: bool,
}

impl Iterator for StreamMatches {
    type Item = Result<Value, MatchError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let item = match self.search.next()? {
            Ok(env) => self.clause.apply(&env),
            Err(e) => Err(e),
        };
        if item.is_err() {
            self.done = true;
        }
        Some(item)
    }
}
