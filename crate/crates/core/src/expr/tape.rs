use std::cell::RefCell;
use std::collections::HashMap;

use super::{Expr, Node};

#[derive(Debug, Clone, Copy)]
enum Op {
    Const(f64),
    Var(usize),
    Add(u32, u32),
    Sub(u32, u32),
    Mul(u32, u32),
    Div(u32, u32),
    Neg(u32),
    Pow(u32, i32),
    Sin(u32),
    Cos(u32),
    Exp(u32),
    Sqrt(u32),
}

/// Straight-line program evaluating one or more expressions at a point.
///
/// Subtrees shared through `Arc` (as produced by differentiation) are
/// computed once.
#[derive(Debug, Clone)]
pub struct Tape {
    ops: Vec<Op>,
    outputs: Vec<u32>,
    arity: usize,
}

thread_local! {
    static SCRATCH: RefCell<Vec<f64>> = const { RefCell::new(Vec::new()) };
}

struct Builder {
    ops: Vec<Op>,
    memo: HashMap<*const Node, u32>,
}

impl Builder {
    fn push(&mut self, op: Op) -> u32 {
        self.ops.push(op);
        (self.ops.len() - 1) as u32
    }

    fn emit(&mut self, e: &Expr) -> u32 {
        let key = std::sync::Arc::as_ptr(&e.0);
        if let Some(&slot) = self.memo.get(&key) {
            return slot;
        }
        let op = match e.node() {
            Node::Const(c) => Op::Const(*c),
            Node::Var(i) => Op::Var(*i),
            Node::Add(a, b) => Op::Add(self.emit(a), self.emit(b)),
            Node::Sub(a, b) => Op::Sub(self.emit(a), self.emit(b)),
            Node::Mul(a, b) => Op::Mul(self.emit(a), self.emit(b)),
            Node::Div(a, b) => Op::Div(self.emit(a), self.emit(b)),
            Node::Neg(a) => Op::Neg(self.emit(a)),
            Node::Pow(a, n) => Op::Pow(self.emit(a), *n as i32),
            Node::Sin(a) => Op::Sin(self.emit(a)),
            Node::Cos(a) => Op::Cos(self.emit(a)),
            Node::Exp(a) => Op::Exp(self.emit(a)),
            Node::Sqrt(a) => Op::Sqrt(self.emit(a)),
        };
        let slot = self.push(op);
        self.memo.insert(key, slot);
        slot
    }
}

impl Tape {
    pub fn compile(e: &Expr) -> Tape {
        Self::compile_many(std::slice::from_ref(e))
    }

    pub fn compile_many(exprs: &[Expr]) -> Tape {
        let mut b = Builder {
            ops: Vec::new(),
            memo: HashMap::new(),
        };
        let outputs = exprs.iter().map(|e| b.emit(e)).collect();
        Tape {
            ops: b.ops,
            outputs,
            arity: exprs.iter().map(Expr::arity).max().unwrap_or(0),
        }
    }

    pub fn outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Evaluates all outputs at `x` into `out`.
    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        assert!(x.len() >= self.arity, "point has too few coordinates");
        assert_eq!(out.len(), self.outputs.len());
        SCRATCH.with(|cell| {
            let mut slots = cell.borrow_mut();
            slots.clear();
            slots.reserve(self.ops.len());
            for op in &self.ops {
                let s = &slots;
                let v = match *op {
                    Op::Const(c) => c,
                    Op::Var(i) => x[i],
                    Op::Add(a, b) => s[a as usize] + s[b as usize],
                    Op::Sub(a, b) => s[a as usize] - s[b as usize],
                    Op::Mul(a, b) => s[a as usize] * s[b as usize],
                    Op::Div(a, b) => s[a as usize] / s[b as usize],
                    Op::Neg(a) => -s[a as usize],
                    Op::Pow(a, n) => s[a as usize].powi(n),
                    Op::Sin(a) => s[a as usize].sin(),
                    Op::Cos(a) => s[a as usize].cos(),
                    Op::Exp(a) => s[a as usize].exp(),
                    Op::Sqrt(a) => s[a as usize].sqrt(),
                };
                slots.push(v);
            }
            for (o, &slot) in out.iter_mut().zip(&self.outputs) {
                *o = slots[slot as usize];
            }
        });
    }

    /// Value of the first output.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut out = vec![0.0; self.outputs.len()];
        self.eval_into(x, &mut out);
        out[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tape_matches_tree_and_shares_subtrees() {
        let x = Expr::var(0);
        let y = Expr::var(1);
        let e = (x.clone() * y.clone()).exp() + (x.clone() - y.clone()).powi(3);
        let g = [e.diff(0), e.diff(1)];
        let tape = Tape::compile_many(&g);
        let p = [0.3, -0.7];
        let mut out = [0.0; 2];
        tape.eval_into(&p, &mut out);
        assert!((out[0] - g[0].eval(&p)).abs() < 1e-14);
        assert!((out[1] - g[1].eval(&p)).abs() < 1e-14);
        // exp(x*y) is reused by both partials
        assert!(tape.len() < g[0].size() + g[1].size());
        assert!((Tape::compile(&e).eval(&p) - e.eval(&p)).abs() < 1e-15);
    }
}
