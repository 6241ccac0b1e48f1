//! Forward execution of a lowered program.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use gga_core::RngStream;
use gga_ppl::{NodeId, NodeKind, OpCode, ProgramGraph};

use crate::error::VerifyError;

/// Realizations are produced in chunks of this many; chunk `c` draws node
/// `draws[i]` from stream `c * draws.len() + i`, whatever the thread count.
pub const CHUNK: usize = 4096;

/// `n` independent realizations of `node`.
pub fn forward_sample(g: &ProgramGraph, node: NodeId, seed: u64, n: usize) -> Result<Vec<f64>, VerifyError> {
    let mut out = forward_sample_many(g, &[node], seed, n)?;
    Ok(out.pop().unwrap_or_default())
}

/// Joint realizations of several nodes; row `j` of every column comes from
/// the same run of the program.
pub fn forward_sample_many(g: &ProgramGraph, nodes: &[NodeId], seed: u64, n: usize) -> Result<Vec<Vec<f64>>, VerifyError> {
    let plan = Plan::new(g, nodes)?;
    forward_with_threads(&plan, seed, n, default_threads())
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Same as [`forward_sample_many`] with an explicit worker count.
pub fn forward_sample_threads(
    g: &ProgramGraph,
    nodes: &[NodeId],
    seed: u64,
    n: usize,
    threads: usize,
) -> Result<Vec<Vec<f64>>, VerifyError> {
    let plan = Plan::new(g, nodes)?;
    forward_with_threads(&plan, seed, n, threads.max(1))
}

fn forward_with_threads(plan: &Plan, seed: u64, n: usize, threads: usize) -> Result<Vec<Vec<f64>>, VerifyError> {
    if n == 0 {
        return Err(VerifyError::EmptySample);
    }
    let chunks = n.div_ceil(CHUNK);
    let next = AtomicUsize::new(0);
    let done: Mutex<Vec<(usize, Vec<Vec<f64>>)>> = Mutex::new(Vec::with_capacity(chunks));
    let failure: Mutex<Option<(usize, VerifyError)>> = Mutex::new(None);
    let work = || loop {
        let c = next.fetch_add(1, Ordering::Relaxed);
        if c >= chunks {
            break;
        }
        let len = CHUNK.min(n - c * CHUNK);
        match plan.run_chunk(seed, c, len) {
            Ok(cols) => done.lock().unwrap().push((c, cols)),
            Err(e) => {
                let mut f = failure.lock().unwrap();
                if f.as_ref().is_none_or(|(k, _)| c < *k) {
                    *f = Some((c, e));
                }
                next.store(chunks, Ordering::Relaxed);
            }
        }
    };
    let workers = threads.min(chunks);
    if workers <= 1 {
        work();
    } else {
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(work);
            }
        });
    }
    if let Some((_, e)) = failure.into_inner().unwrap() {
        return Err(e);
    }
    let mut done = done.into_inner().unwrap();
    done.sort_by_key(|(c, _)| *c);
    let mut out: Vec<Vec<f64>> = plan.targets.iter().map(|_| Vec::with_capacity(n)).collect();
    for (_, cols) in done {
        for (o, col) in out.iter_mut().zip(cols) {
            o.extend_from_slice(&col);
        }
    }
    Ok(out)
}

struct Plan<'g> {
    g: &'g ProgramGraph,
    targets: Vec<NodeId>,
    /// Top-level nodes to evaluate, in order.
    schedule: Vec<NodeId>,
    /// Direct body nodes of each `iid` op.
    bodies: Vec<Vec<NodeId>>,
    /// Buffers that can be dropped after each schedule position.
    frees: Vec<Vec<NodeId>>,
    draw_index: Vec<usize>,
}

impl<'g> Plan<'g> {
    fn new(g: &'g ProgramGraph, targets: &[NodeId]) -> Result<Self, VerifyError> {
        let len = g.len();
        let mut needed = vec![false; len];
        let mut stack = Vec::new();
        for &t in targets {
            if t >= len {
                return Err(VerifyError::NoSuchNode(t));
            }
            stack.push(t);
        }
        while let Some(i) = stack.pop() {
            if needed[i] {
                continue;
            }
            needed[i] = true;
            stack.extend_from_slice(g.node(i).parents());
        }
        let top = |mut i: NodeId| {
            while let Some(o) = g.node(i).template_of {
                i = o;
            }
            i
        };
        let mut bodies = vec![Vec::new(); len];
        let mut schedule = Vec::new();
        let mut pos = vec![usize::MAX; len];
        for n in &g.nodes {
            if !needed[n.id] {
                continue;
            }
            if let NodeKind::Draw(d) = &n.kind {
                d.check_sampleable().map_err(|e| VerifyError::UnsupportedSampler(n.id, e))?;
            }
            if let NodeKind::Op { code: OpCode::DensProd, .. } = n.kind {
                return Err(VerifyError::UnsupportedOp("dens_prod".into()));
            }
            match n.template_of {
                Some(o) => bodies[o].push(n.id),
                None => {
                    pos[n.id] = schedule.len();
                    schedule.push(n.id);
                }
            }
        }
        let mut last_use = vec![0; len];
        for n in &g.nodes {
            if !needed[n.id] {
                continue;
            }
            let at = pos[top(n.id)];
            for &p in n.parents() {
                if g.node(p).template_of.is_none() {
                    last_use[p] = last_use[p].max(at);
                }
            }
        }
        let mut frees = vec![Vec::new(); schedule.len()];
        for &id in &schedule {
            if !targets.contains(&id) && id != schedule[last_use[id]] {
                frees[last_use[id]].push(id);
            }
        }
        let mut draw_index = vec![usize::MAX; len];
        for (i, &d) in g.draws.iter().enumerate() {
            draw_index[d] = i;
        }
        Ok(Plan { g, targets: targets.to_vec(), schedule, bodies, frees, draw_index })
    }

    fn run_chunk(&self, seed: u64, chunk: usize, len: usize) -> Result<Vec<Vec<f64>>, VerifyError> {
        let mut st = ChunkState {
            values: vec![None; self.g.len()],
            rngs: vec![None; self.g.draws.len()],
            base: chunk as u64 * self.g.draws.len() as u64,
            seed,
            len,
        };
        for (k, &id) in self.schedule.iter().enumerate() {
            self.eval(id, &mut st)?;
            for &p in &self.frees[k] {
                st.values[p] = None;
            }
        }
        Ok(self.targets.iter().map(|&t| st.values[t].clone().unwrap_or_default()).collect())
    }

    fn eval(&self, id: NodeId, st: &mut ChunkState) -> Result<(), VerifyError> {
        let node = self.g.node(id);
        let mut out = vec![0.0; st.len];
        match &node.kind {
            NodeKind::Constant(c) => out.fill(*c),
            NodeKind::Draw(d) => {
                let i = self.draw_index[id];
                let rng = st.rngs[i].get_or_insert_with(|| RngStream::new(st.seed, st.base + i as u64));
                d.fill(rng, &mut out).map_err(|e| VerifyError::UnsupportedSampler(id, e))?;
            }
            NodeKind::Op { code: OpCode::Iid(copies), parents } => {
                let root = parents[0];
                for _ in 0..*copies {
                    for &b in &self.bodies[id] {
                        self.eval(b, st)?;
                    }
                    let v = st.values[root].as_ref().expect("iid body evaluated");
                    for (o, x) in out.iter_mut().zip(v) {
                        *o += x;
                    }
                }
                for &b in &self.bodies[id] {
                    st.values[b] = None;
                }
            }
            NodeKind::Op { code, parents } => {
                let args: Vec<&[f64]> = parents.iter().map(|&p| st.values[p].as_deref().expect("parent evaluated")).collect();
                apply(code, &args, &mut out)?;
            }
        }
        st.values[id] = Some(out);
        Ok(())
    }
}

struct ChunkState {
    values: Vec<Option<Vec<f64>>>,
    rngs: Vec<Option<RngStream>>,
    base: u64,
    seed: u64,
    len: usize,
}

/// Pointwise semantics of an op. `log` acts on `|x|` and fractional powers
/// keep the sign of the base, matching how the tail pass treats them.
pub fn apply(code: &OpCode, args: &[&[f64]], out: &mut [f64]) -> Result<(), VerifyError> {
    let unary = |out: &mut [f64], f: &dyn Fn(f64) -> f64| {
        for (o, &x) in out.iter_mut().zip(args[0]) {
            *o = f(x);
        }
    };
    let binary = |out: &mut [f64], f: &dyn Fn(f64, f64) -> f64| {
        for ((o, &a), &b) in out.iter_mut().zip(args[0]).zip(args[1]) {
            *o = f(a, b);
        }
    };
    match *code {
        OpCode::Add => binary(out, &|a, b| a + b),
        OpCode::Sub => binary(out, &|a, b| a - b),
        OpCode::Mul => binary(out, &|a, b| a * b),
        OpCode::Div => binary(out, &|a, b| a / b),
        OpCode::Neg => unary(out, &|x| -x),
        OpCode::Abs => unary(out, &f64::abs),
        OpCode::Recip => unary(out, &f64::recip),
        OpCode::Exp => unary(out, &f64::exp),
        OpCode::Log => unary(out, &|x| x.abs().ln()),
        OpCode::Pow(b) => unary(out, &|x| signed_pow(x, b)),
        OpCode::Scale(c) => unary(out, &|x| c * x),
        OpCode::Shift(c) => unary(out, &|x| x + c),
        OpCode::Lipschitz { l, holder } => {
            out.fill(0.0);
            for a in args {
                for (o, &x) in out.iter_mut().zip(a.iter()) {
                    *o = o.max(x.abs().powf(holder));
                }
            }
            for o in out.iter_mut() {
                *o *= l;
            }
        }
        OpCode::Iid(_) | OpCode::DensProd => return Err(VerifyError::UnsupportedOp(code.to_string())),
    }
    Ok(())
}

fn signed_pow(x: f64, b: f64) -> f64 {
    if b.fract() == 0.0 && b.abs() < 1024.0 {
        x.powi(b as i32)
    } else {
        x.signum() * x.abs().powf(b)
    }
}
