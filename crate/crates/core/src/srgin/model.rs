use super::{ModelConfig, Pooling, StateInit};
use crate::error::{Error, Result};
use crate::features::{assemble_ppair, assemble_rship, FeatureBundle};
use crate::graph::{SocialGraph, Task};
use crate::nn::{self, dropout, GruCell, LinearLayer, Mode};
use crate::tensor::{ops, ParamStore, SeededRng, Tape, Tensor, Var};

/// Per-graph inputs assembled from a feature bundle, in edge and person order.
#[derive(Clone, Debug)]
pub struct GraphInputs {
    pub x_n: Vec<Tensor>,
    pub x_e: Vec<Tensor>,
    pub f_age: Vec<Tensor>,
    pub f_gender: Vec<Tensor>,
    /// For each edge, the other edges sharing an endpoint with it.
    pub neighbours: Vec<Vec<usize>>,
}

/// Recurrent states of every edge at one step, as tape handles.
#[derive(Clone, Debug)]
pub struct StateVars {
    pub h_n: Vec<Var>,
    pub h_e: Vec<Var>,
    /// Edge GRU output before pooling; absent at the initial step.
    pub h_e_raw: Option<Vec<Var>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepStates {
    pub h_n: Vec<Tensor>,
    pub h_e: Vec<Tensor>,
    pub h_e_raw: Option<Vec<Tensor>>,
}

/// States of one episode (image), index 0 being the initial states.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EpisodeStates {
    pub steps: Vec<StepStates>,
}

impl EpisodeStates {
    pub fn last(&self) -> Option<&StepStates> {
        self.steps.last()
    }
}

#[derive(Clone, Debug)]
pub struct ForwardOutput {
    pub relationship: Vec<Var>,
    pub domain: Vec<Var>,
    pub age: Vec<Var>,
    pub gender: Vec<Var>,
    pub states: EpisodeStates,
}

impl ForwardOutput {
    pub fn logits(&self, task: Task) -> &[Var] {
        match task {
            Task::Relationship => &self.relationship,
            Task::Domain => &self.domain,
            Task::Age => &self.age,
            Task::Gender => &self.gender,
        }
    }
}

/// Class probabilities and argmax labels for one graph.
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub graph: SocialGraph,
    pub relationship_probs: Vec<Vec<f64>>,
    pub domain_probs: Vec<Vec<f64>>,
    pub age_probs: Vec<Vec<f64>>,
    pub gender_probs: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SrgInModel {
    config: ModelConfig,
    proj_node: LinearLayer,
    proj_edge: LinearLayer,
    ppair_gru: GruCell,
    rship_gru: GruCell,
    head_relationship: LinearLayer,
    head_domain: LinearLayer,
    head_age: LinearLayer,
    head_gender: LinearLayer,
    pub params: ParamStore,
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

fn mean_of(tape: &mut Tape, vars: &[Var]) -> Result<Var> {
    let sum = tape.add_n(vars)?;
    Ok(tape.scale(sum, 1.0 / vars.len() as f64))
}

impl SrgInModel {
    /// Registers every parameter and applies the default initialisation.
    pub fn new(config: ModelConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let h = config.hidden;
        let f = &config.features;
        let b = config.bias;
        let mut model = SrgInModel {
            proj_node: LinearLayer::new("proj_node", f.ppair_input_dim(), h, b),
            proj_edge: LinearLayer::new("proj_edge", f.rship_dim(config.with_scene), h, b),
            ppair_gru: GruCell::new("ppair_gru", h, h, b),
            rship_gru: GruCell::new("rship_gru", h, h, b),
            head_relationship: LinearLayer::new("head.relationship", h, config.num_relationships, true),
            head_domain: LinearLayer::new("head.domain", h, config.num_domains, true),
            head_age: LinearLayer::new("head.age", f.dim_age, config.num_ages, true),
            head_gender: LinearLayer::new("head.gender", f.dim_gender, config.num_genders, true),
            params: ParamStore::new(),
            config,
        };
        let mut store = ParamStore::new();
        for layer in model.linear_layers() {
            layer.register(&mut store)?;
        }
        model.ppair_gru.register(&mut store)?;
        model.rship_gru.register(&mut store)?;
        nn::init_default(&mut store, seed)?;
        model.params = store;
        Ok(model)
    }

    fn linear_layers(&self) -> [&LinearLayer; 6] {
        [
            &self.proj_node,
            &self.proj_edge,
            &self.head_relationship,
            &self.head_domain,
            &self.head_age,
            &self.head_gender,
        ]
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn ppair_gru(&self) -> &GruCell {
        &self.ppair_gru
    }

    pub fn rship_gru(&self) -> &GruCell {
        &self.rship_gru
    }

    /// Number of message-passing steps used by [`forward`](Self::forward).
    pub fn set_time_steps(&mut self, t: usize) {
        self.config.time_steps = t;
    }

    pub fn set_pooling(&mut self, pooling: Pooling) {
        self.config.pooling = pooling;
    }

    pub fn set_state_init(&mut self, init: StateInit) {
        self.config.state_init = init;
    }

    pub fn set_cross_edge(&mut self, on: bool) {
        self.config.cross_edge = on;
    }

    /// Assembles inputs for every person and edge of `graph`.
    pub fn prepare(&self, graph: &SocialGraph, bundle: &FeatureBundle) -> Result<GraphInputs> {
        let missing = bundle.missing_keys(graph);
        if !missing.is_empty() {
            return Err(Error::MissingFeature { keys: missing });
        }
        let cfg = &self.config.features;
        if bundle.config() != cfg {
            return Err(Error::Config(format!(
                "feature bundle dimensions {:?} differ from model {:?}",
                bundle.config(),
                cfg
            )));
        }
        let img = &graph.image_id;
        let mut inputs = GraphInputs {
            x_n: Vec::with_capacity(graph.edges.len()),
            x_e: Vec::with_capacity(graph.edges.len()),
            f_age: Vec::with_capacity(graph.persons.len()),
            f_gender: Vec::with_capacity(graph.persons.len()),
            neighbours: Vec::with_capacity(graph.edges.len()),
        };
        for e in &graph.edges {
            let fi = bundle.person(img, e.src)?;
            let fj = bundle.person(img, e.dst)?;
            inputs.x_n.push(assemble_ppair(fi, fj, cfg)?);
            inputs.x_e.push(assemble_rship(bundle.edge(img, e.src, e.dst)?, cfg, self.config.with_scene)?);
        }
        for p in &graph.persons {
            let f = bundle.person(img, p.id)?;
            inputs.f_age.push(Tensor::vector(f.age.clone()));
            inputs.f_gender.push(Tensor::vector(f.gender.clone()));
        }
        for (k, e) in graph.edges.iter().enumerate() {
            let nbrs = graph
                .edges
                .iter()
                .enumerate()
                .filter(|(l, o)| *l != k && (o.src == e.src || o.src == e.dst || o.dst == e.src || o.dst == e.dst))
                .map(|(l, _)| l)
                .collect();
            inputs.neighbours.push(nbrs);
        }
        Ok(inputs)
    }

    /// Projected node-pair and edge inputs, one pair per edge.
    pub fn project(&self, tape: &mut Tape, inputs: &GraphInputs) -> Result<(Vec<Var>, Vec<Var>)> {
        let mut u_n = Vec::with_capacity(inputs.x_n.len());
        let mut u_e = Vec::with_capacity(inputs.x_e.len());
        for (x_n, x_e) in inputs.x_n.iter().zip(&inputs.x_e) {
            let x_n = tape.constant(x_n.clone());
            u_n.push(self.proj_node.forward(tape, &self.params, x_n)?);
            let x_e = tape.constant(x_e.clone());
            u_e.push(self.proj_edge.forward(tape, &self.params, x_e)?);
        }
        Ok((u_n, u_e))
    }

    /// Initial states from the projected inputs, or zeros.
    pub fn init_states(&self, tape: &mut Tape, u_n: &[Var], u_e: &[Var]) -> Result<StateVars> {
        if u_n.len() != u_e.len() {
            return Err(Error::dim("init_states", &[u_n.len()], &[u_e.len()]));
        }
        for v in u_n.iter().chain(u_e) {
            if tape.value(*v).shape() != [self.config.hidden] {
                return Err(Error::dim("init_states", tape.value(*v).shape(), &[self.config.hidden]));
            }
        }
        Ok(match self.config.state_init {
            StateInit::Features => StateVars {
                h_n: u_n.to_vec(),
                h_e: u_e.to_vec(),
                h_e_raw: None,
            },
            StateInit::Zero => {
                let zero = |tape: &mut Tape| tape.constant(Tensor::zeros(&[self.config.hidden]));
                StateVars {
                    h_n: u_n.iter().map(|_| zero(tape)).collect(),
                    h_e: u_e.iter().map(|_| zero(tape)).collect(),
                    h_e_raw: None,
                }
            }
        })
    }

    /// One update of every edge: both GRUs step on their (constant) inputs,
    /// then the edge state becomes the pool of the new edge and node-pair
    /// states.
    pub fn message_pass_step(
        &self,
        tape: &mut Tape,
        states: &StateVars,
        u_n: &[Var],
        u_e: &[Var],
        neighbours: &[Vec<usize>],
    ) -> Result<StateVars> {
        let n = states.h_n.len();
        if u_n.len() != n || u_e.len() != n || states.h_e.len() != n {
            return Err(Error::dim("message_pass_step", &[n], &[u_n.len(), u_e.len()]));
        }
        let mut next = StateVars {
            h_n: Vec::with_capacity(n),
            h_e: Vec::with_capacity(n),
            h_e_raw: Some(Vec::with_capacity(n)),
        };
        for k in 0..n {
            let mut x_n = u_n[k];
            if self.config.cross_edge {
                if let Some(nbrs) = neighbours.get(k).filter(|v| !v.is_empty()) {
                    let msgs: Vec<Var> = nbrs.iter().map(|&l| states.h_e[l]).collect();
                    let m = mean_of(tape, &msgs)?;
                    x_n = tape.add(x_n, m)?;
                }
            }
            let h_n = self.ppair_gru.step(tape, &self.params, states.h_n[k], x_n)?.h_next;
            let raw = self.rship_gru.step(tape, &self.params, states.h_e[k], u_e[k])?.h_next;
            let h_e = match self.config.pooling {
                Pooling::Mean => tape.mean_pool(raw, h_n)?,
                Pooling::Max => tape.max_pool(raw, h_n)?,
            };
            next.h_n.push(h_n);
            next.h_e.push(h_e);
            next.h_e_raw.as_mut().expect("set above").push(raw);
        }
        Ok(next)
    }

    fn snapshot(tape: &Tape, s: &StateVars) -> StepStates {
        let vals = |vs: &[Var]| vs.iter().map(|v| tape.value(*v).clone()).collect();
        StepStates {
            h_n: vals(&s.h_n),
            h_e: vals(&s.h_e),
            h_e_raw: s.h_e_raw.as_deref().map(vals),
        }
    }

    /// Full pass over one graph. In train mode dropout (if `dropout_rate > 0`)
    /// is applied to the projected GRU inputs.
    pub fn forward_inputs(
        &self,
        tape: &mut Tape,
        inputs: &GraphInputs,
        mode: Mode,
        dropout_rate: f64,
        rng: &mut SeededRng,
    ) -> Result<ForwardOutput> {
        let (u_n, u_e) = self.project(tape, inputs)?;
        let mut states = self.init_states(tape, &u_n, &u_e)?;
        let mut episode = EpisodeStates {
            steps: vec![Self::snapshot(tape, &states)],
        };
        let (mut g_n, mut g_e) = (u_n.clone(), u_e.clone());
        if mode == Mode::Train && dropout_rate > 0.0 {
            for v in g_n.iter_mut().chain(g_e.iter_mut()) {
                *v = dropout(tape, *v, dropout_rate, mode, rng)?;
            }
        }
        for _ in 0..self.config.time_steps {
            states = self.message_pass_step(tape, &states, &g_n, &g_e, &inputs.neighbours)?;
            episode.steps.push(Self::snapshot(tape, &states));
        }

        let mut out = ForwardOutput {
            relationship: Vec::with_capacity(states.h_e.len()),
            domain: Vec::with_capacity(states.h_e.len()),
            age: Vec::with_capacity(inputs.f_age.len()),
            gender: Vec::with_capacity(inputs.f_gender.len()),
            states: episode,
        };
        for h in &states.h_e {
            out.relationship.push(self.head_relationship.forward(tape, &self.params, *h)?);
            out.domain.push(self.head_domain.forward(tape, &self.params, *h)?);
        }
        for (fa, fg) in inputs.f_age.iter().zip(&inputs.f_gender) {
            let fa = tape.constant(fa.clone());
            out.age.push(self.head_age.forward(tape, &self.params, fa)?);
            let fg = tape.constant(fg.clone());
            out.gender.push(self.head_gender.forward(tape, &self.params, fg)?);
        }
        Ok(out)
    }

    /// Eval-mode pass over one graph.
    pub fn forward(&self, tape: &mut Tape, graph: &SocialGraph, bundle: &FeatureBundle) -> Result<ForwardOutput> {
        let inputs = self.prepare(graph, bundle)?;
        let mut rng = SeededRng::new(0);
        self.forward_inputs(tape, &inputs, Mode::Eval, 0.0, &mut rng)
    }

    /// Predicted labels (argmax, lowest index on ties) and probabilities.
    pub fn predict(&self, graph: &SocialGraph, bundle: &FeatureBundle) -> Result<Prediction> {
        let mut tape = Tape::new();
        let out = self.forward(&mut tape, graph, bundle)?;
        let probs = |vars: &[Var]| -> Result<Vec<Vec<f64>>> {
            vars.iter()
                .map(|v| Ok(ops::softmax(tape.value(*v))?.into_data()))
                .collect()
        };
        let mut pred = Prediction {
            graph: graph.clone(),
            relationship_probs: probs(&out.relationship)?,
            domain_probs: probs(&out.domain)?,
            age_probs: probs(&out.age)?,
            gender_probs: probs(&out.gender)?,
        };
        for (k, e) in pred.graph.edges.iter_mut().enumerate() {
            e.relationship = Some(argmax(&pred.relationship_probs[k]));
            e.domain = Some(argmax(&pred.domain_probs[k]));
        }
        for (i, p) in pred.graph.persons.iter_mut().enumerate() {
            p.age = Some(argmax(&pred.age_probs[i]));
            p.gender = Some(argmax(&pred.gender_probs[i]));
        }
        Ok(pred)
    }
}
