use std::collections::BTreeMap;

use super::value::Value;

/// Prefix of scratch variables that are never exported.
pub const TEMP_PREFIX: &str = "temp_";

/// Per-project variable store shared by every query run on the project.
///
/// Plain variables live in one flat map. Pattern variables are bound in a
/// stack of scopes layered over it: they shadow plain variables of the same
/// name, may be reassigned, and disappear when their select finishes.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Environment {
    vars: BTreeMap<String, Value>,
    scopes: Vec<Vec<(String, Value)>>,
    counts: Vec<usize>,
    call_depth: usize,
}

impl Environment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_vars(vars: BTreeMap<String, Value>) -> Self {
        Environment {
            vars,
            ..Self::default()
        }
    }

    /// Looks up a name, innermost pattern binding first. `None` means unset.
    pub fn get(&self, name: &str) -> Option<&Value> {
        for scope in self.scopes.iter().rev() {
            if let Some((_, v)) = scope.iter().find(|(n, _)| n == name) {
                return Some(v);
            }
        }
        self.vars.get(name)
    }

    /// Assigns to the innermost pattern binding of `name`, or else to the flat map.
    pub fn set(&mut self, name: &str, value: Value) {
        for scope in self.scopes.iter_mut().rev() {
            if let Some((_, slot)) = scope.iter_mut().find(|(n, _)| n == name) {
                *slot = value;
                return;
            }
        }
        self.vars.insert(name.to_string(), value);
    }

    /// The flat variables, pattern bindings excluded.
    pub fn variables(&self) -> &BTreeMap<String, Value> {
        &self.vars
    }

    /// Variables written to `.vars` files: everything but `temp_*`.
    pub fn exported(&self) -> impl Iterator<Item = (&String, &Value)> {
        self.vars.iter().filter(|(k, _)| !k.starts_with(TEMP_PREFIX))
    }

    pub fn push_scope(&mut self, bindings: Vec<(String, Value)>) {
        self.scopes.push(bindings);
    }

    pub fn pop_scope(&mut self) {
        self.scopes.pop();
    }

    /// The most recently bound pattern node still in scope.
    pub fn innermost_node(&self) -> Option<crate::ast::NodeId> {
        self.scopes
            .iter()
            .rev()
            .flat_map(|s| s.iter())
            .find_map(|(_, v)| v.as_node())
    }

    pub fn scope_depth(&self) -> usize {
        self.scopes.len()
    }

    /// Row count of the innermost active select, as seen by `count(*)`.
    pub fn current_count(&self) -> usize {
        self.counts.last().copied().unwrap_or(0)
    }

    pub(crate) fn push_count(&mut self, n: usize) {
        self.counts.push(n);
    }

    pub(crate) fn pop_count(&mut self) {
        self.counts.pop();
    }

    pub fn call_depth(&self) -> usize {
        self.call_depth
    }

    pub(crate) fn enter_call(&mut self) {
        self.call_depth += 1;
    }

    pub(crate) fn leave_call(&mut self) {
        self.call_depth -= 1;
    }

    /// Drops pattern scopes and counters left behind by an aborted run.
    pub(crate) fn reset_frames(&mut self) {
        self.scopes.clear();
        self.counts.clear();
        self.call_depth = 0;
    }
}
