//! Shortened polar codes with CRC-aided successive-cancellation list decoding.
//!
//! Codewords are `x = u F^{⊗N}` with `F = [[1, 0], [1, 1]]` in natural bit
//! order. A transmitted length `n` that is not a power of two is obtained by
//! shortening the mother code of length `N = 2^⌈log2 n⌉`: the last `N - n`
//! input positions are frozen to zero, which forces the last `N - n` codeword
//! bits to zero, so they are not transmitted and the decoder treats them as
//! perfectly known.
//!
//! The information set is chosen by Gaussian-approximation density evolution
//! at a design SNR that depends on the code rate. The decoder is the
//! LLR-domain list decoder with lazy copying of the per-layer arrays, so a
//! decode costs `O(L N log N)`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use super::crc::{crc11, crc11_check, CRC11_LEN};
use crate::error::{Error, Result};

/// Default list size of the CRC-aided decoder.
pub const LIST_SIZE: usize = 8;

/// Magnitude used for the known-zero shortened bits and as the saturation
/// limit of channel LLRs.
const LLR_LIMIT: f32 = 1.0e6;

/// Design SNR (dB, BPSK-equivalent Es/N0) for the reliability ordering.
pub fn design_snr_db(rate: f64) -> f64 {
    match rate {
        r if r <= 0.51 => -1.0,
        r if r <= 0.67 => 1.0,
        r if r <= 0.76 => 2.0,
        r if r <= 0.84 => 3.0,
        _ => 4.0,
    }
}

/// A shortened polar code with optional CRC-11 outer code.
#[derive(Debug, Clone)]
pub struct PolarCode {
    n: usize,
    mother_len: usize,
    k: usize,
    crc: bool,
    /// Input positions carrying payload (and CRC) bits, ascending.
    info_positions: Vec<usize>,
    frozen: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarDecoded {
    pub bits: Vec<u8>,
    /// CRC pass of the selected path (always true for codes without CRC).
    pub success: bool,
}

impl PolarCode {
    /// Builds a code carrying `k` payload bits in `n` coded bits. With `crc`
    /// set, 11 CRC bits are added on top of the payload.
    pub fn new(n: usize, k: usize, crc: bool, design_snr_db: f64) -> Result<Self> {
        let crc_len = if crc { CRC11_LEN } else { 0 };
        if n == 0 {
            return Err(Error::param("n", "coded length must be positive"));
        }
        if k == 0 || k + crc_len > n {
            return Err(Error::param(
                "k",
                format!("payload {k} (+{crc_len} CRC) does not fit in {n} coded bits"),
            ));
        }
        let mother_len = n.next_power_of_two();
        let reliability = ga_reliability(mother_len, n, design_snr_db);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| reliability[b].total_cmp(&reliability[a]).then(a.cmp(&b)));
        let mut info_positions: Vec<usize> = order[..k + crc_len].to_vec();
        info_positions.sort_unstable();
        let mut frozen = vec![true; mother_len];
        for &p in &info_positions {
            frozen[p] = false;
        }
        Ok(Self {
            n,
            mother_len,
            k,
            crc,
            info_positions,
            frozen,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn mother_len(&self) -> usize {
        self.mother_len
    }

    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    pub fn has_crc(&self) -> bool {
        self.crc
    }

    pub fn encode(&self, info: &[u8]) -> Result<Vec<u8>> {
        Error::check_len("polar payload", self.k, info.len())?;
        let mut carried = info.to_vec();
        if self.crc {
            carried.extend_from_slice(&crc11(info));
        }
        Ok(self.encode_carried(&carried))
    }

    /// Encodes a word that already includes the CRC bits (if any).
    pub(crate) fn encode_carried(&self, carried: &[u8]) -> Vec<u8> {
        debug_assert_eq!(carried.len(), self.info_positions.len());
        let mut u = vec![0u8; self.mother_len];
        for (&p, &b) in self.info_positions.iter().zip(carried) {
            u[p] = b & 1;
        }
        polar_transform(&mut u);
        debug_assert!(u[self.n..].iter().all(|&b| b == 0));
        u.truncate(self.n);
        u
    }

    /// List decoding of `n` channel LLRs (positive favours bit 0).
    pub fn decode(&self, llrs: &[f64], list_size: usize) -> Result<PolarDecoded> {
        Error::check_len("polar LLRs", self.n, llrs.len())?;
        let mut channel = vec![LLR_LIMIT; self.mother_len];
        for (c, &l) in channel.iter_mut().zip(llrs) {
            *c = if l.is_nan() {
                0.0
            } else {
                (l as f32).clamp(-LLR_LIMIT, LLR_LIMIT)
            };
        }
        let mut dec = ListDecoder::new(self.mother_len, list_size.max(1));
        let candidates = dec.run(&channel, &self.frozen, true);

        let mut best: Option<Vec<u8>> = None;
        for mut x in candidates {
            polar_transform(&mut x);
            let carried: Vec<u8> = self.info_positions.iter().map(|&p| x[p]).collect();
            if !self.crc || crc11_check(&carried) {
                return Ok(PolarDecoded {
                    bits: carried[..self.k].to_vec(),
                    success: true,
                });
            }
            if best.is_none() {
                best = Some(carried);
            }
        }
        let carried = best.unwrap_or_else(|| vec![0; self.k]);
        Ok(PolarDecoded {
            bits: carried[..self.k].to_vec(),
            success: false,
        })
    }
}

/// In-place `x = u F^{⊗N}`; the transform is its own inverse over GF(2).
pub fn polar_transform(bits: &mut [u8]) {
    let n = bits.len();
    debug_assert!(n.is_power_of_two());
    let mut half = 1;
    while half < n {
        for block in bits.chunks_mut(2 * half) {
            let (a, b) = block.split_at_mut(half);
            for (x, y) in a.iter_mut().zip(b.iter()) {
                *x ^= *y;
            }
        }
        half *= 2;
    }
}

type CodeKey = (usize, usize, u64);

fn code_cache() -> &'static RwLock<HashMap<CodeKey, Arc<PolarCode>>> {
    static CACHE: OnceLock<RwLock<HashMap<CodeKey, Arc<PolarCode>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// The CRC-aided code used for `k` payload bits in `n` coded bits at the
/// rate-based default design SNR, built once and shared afterwards.
pub fn shared_code(n: usize, k: usize) -> Result<Arc<PolarCode>> {
    let rate = (k + CRC11_LEN) as f64 / n.max(1) as f64;
    shared_code_with(n, k, design_snr_db(rate))
}

/// Like [`shared_code`] with an explicit design SNR.
pub fn shared_code_with(n: usize, k: usize, design_snr_db: f64) -> Result<Arc<PolarCode>> {
    let key = (n, k, design_snr_db.to_bits());
    if let Some(code) = code_cache().read().expect("polar cache poisoned").get(&key) {
        return Ok(code.clone());
    }
    let code = Arc::new(PolarCode::new(n, k, true, design_snr_db)?);
    code_cache()
        .write()
        .expect("polar cache poisoned")
        .entry(key)
        .or_insert_with(|| code.clone());
    Ok(code)
}

/// Encodes `k` payload bits (CRC-11 appended internally) into `n` coded bits.
pub fn polar_encode(info_bits: &[u8], n: usize, k: usize) -> Result<Vec<u8>> {
    Error::check_len("polar payload", k, info_bits.len())?;
    shared_code(n, k)?.encode(info_bits)
}

/// CRC-aided list decoding with the default list size. Failure to find a
/// CRC-valid path is reported through [`PolarDecoded::success`].
pub fn polar_decode(llrs: &[f64], n: usize, k: usize) -> Result<PolarDecoded> {
    shared_code(n, k)?.decode(llrs, LIST_SIZE)
}

// Gaussian approximation of the LLR mean evolution. Works with ln φ(μ) so
// that very reliable channels (and the infinite-mean shortened ones) do not
// underflow.

fn ln_phi(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x.is_infinite() {
        f64::NEG_INFINITY
    } else if x < 10.0 {
        -0.4527 * x.powf(0.86) + 0.0218
    } else {
        0.5 * (std::f64::consts::PI / x).ln() - x / 4.0 + (1.0 - 10.0 / (7.0 * x)).ln()
    }
}

fn ln_phi_inv(y: f64) -> f64 {
    if y >= 0.0 {
        return 0.0;
    }
    if y == f64::NEG_INFINITY {
        return f64::INFINITY;
    }
    if y >= ln_phi(10.0) {
        return ((0.0218 - y) / 0.4527).powf(1.0 / 0.86);
    }
    // Newton on the tail branch, which is strictly decreasing.
    let mut x = (-4.0 * y).max(10.0);
    for _ in 0..50 {
        let f = ln_phi(x) - y;
        let df = -0.5 / x - 0.25 + (10.0 / (7.0 * x * x)) / (1.0 - 10.0 / (7.0 * x));
        let step = f / df;
        x = (x - step).max(10.0);
        if step.abs() < 1e-10 * x {
            break;
        }
    }
    x
}

fn check_node_mean(a: f64, b: f64) -> f64 {
    let (la, lb) = (ln_phi(a), ln_phi(b));
    // ln(φa + φb - φa φb)
    let hi = la.max(lb);
    if hi == f64::NEG_INFINITY {
        return f64::INFINITY;
    }
    let lo = la.min(lb);
    let sum = hi + (1.0 + (lo - hi).exp() - (lo).exp()).ln();
    ln_phi_inv(sum.min(0.0))
}

/// Mean LLR of every input position of the mother code; codeword bits from
/// `n` onward are shortened (known zero, infinite mean).
fn ga_reliability(mother_len: usize, n: usize, design_snr_db: f64) -> Vec<f64> {
    let mu0 = 4.0 * 10f64.powf(design_snr_db / 10.0);
    let mut mu: Vec<f64> = (0..mother_len)
        .map(|i| if i < n { mu0 } else { f64::INFINITY })
        .collect();
    let mut size = mother_len;
    while size > 1 {
        let half = size / 2;
        for node in mu.chunks_mut(size) {
            let (first, second) = node.split_at_mut(half);
            for (a, b) in first.iter_mut().zip(second.iter_mut()) {
                let left = check_node_mean(*a, *b);
                let right = *a + *b;
                *a = left;
                *b = right;
            }
        }
        size = half;
    }
    mu
}

/// List decoder state. Layer `λ` holds arrays of length `2^(m-λ)`; layer 0
/// is the channel (LLRs shared, read-only) and layer `m` the leaves.
struct ListDecoder {
    m: usize,
    list: usize,
    llr: Vec<Vec<f32>>,
    bits: Vec<Vec<[u8; 2]>>,
    path_array: Vec<Vec<usize>>,
    refcount: Vec<Vec<u32>>,
    free_arrays: Vec<Vec<usize>>,
    free_paths: Vec<usize>,
    active: Vec<bool>,
    metric: Vec<f64>,
}

impl ListDecoder {
    fn new(mother_len: usize, list: usize) -> Self {
        let m = mother_len.trailing_zeros() as usize;
        let size = |layer: usize| 1usize << (m - layer);
        let llr = (0..=m)
            .map(|l| if l == 0 { Vec::new() } else { vec![0.0; list * size(l)] })
            .collect();
        let bits = (0..=m).map(|l| vec![[0u8; 2]; list * size(l)]).collect();
        Self {
            m,
            list,
            llr,
            bits,
            path_array: vec![vec![0; list]; m + 1],
            refcount: vec![vec![0; list]; m + 1],
            free_arrays: (0..=m).map(|_| (0..list).rev().collect()).collect(),
            free_paths: (0..list).rev().collect(),
            active: vec![false; list],
            metric: vec![0.0; list],
        }
    }

    fn size(&self, layer: usize) -> usize {
        1 << (self.m - layer)
    }

    fn assign_initial_path(&mut self) -> usize {
        let l = self.free_paths.pop().expect("list exhausted");
        self.active[l] = true;
        self.metric[l] = 0.0;
        for layer in 0..=self.m {
            let s = self.free_arrays[layer].pop().expect("arrays exhausted");
            self.path_array[layer][l] = s;
            self.refcount[layer][s] = 1;
        }
        l
    }

    fn clone_path(&mut self, l: usize) -> usize {
        let c = self.free_paths.pop().expect("list exhausted");
        self.active[c] = true;
        self.metric[c] = self.metric[l];
        for layer in 0..=self.m {
            let s = self.path_array[layer][l];
            self.path_array[layer][c] = s;
            self.refcount[layer][s] += 1;
        }
        c
    }

    fn kill_path(&mut self, l: usize) {
        self.active[l] = false;
        self.free_paths.push(l);
        for layer in 0..=self.m {
            let s = self.path_array[layer][l];
            self.refcount[layer][s] -= 1;
            if self.refcount[layer][s] == 0 {
                self.free_arrays[layer].push(s);
            }
        }
    }

    /// Array index of path `l` at `layer`, copied first if shared.
    fn writable(&mut self, layer: usize, l: usize) -> usize {
        let s = self.path_array[layer][l];
        if self.refcount[layer][s] == 1 {
            return s;
        }
        let t = self.free_arrays[layer].pop().expect("arrays exhausted");
        let sz = self.size(layer);
        if layer > 0 {
            self.llr[layer].copy_within(s * sz..(s + 1) * sz, t * sz);
        }
        self.bits[layer].copy_within(s * sz..(s + 1) * sz, t * sz);
        self.refcount[layer][s] -= 1;
        self.refcount[layer][t] = 1;
        self.path_array[layer][l] = t;
        t
    }

    fn active_paths(&self) -> Vec<usize> {
        (0..self.list).filter(|&l| self.active[l]).collect()
    }

    fn calc_llr(&mut self, channel: &[f32], layer: usize, phase: usize) {
        if layer == 0 {
            return;
        }
        let psi = phase >> 1;
        if phase & 1 == 0 {
            self.calc_llr(channel, layer - 1, psi);
        }
        let sz = self.size(layer);
        for l in self.active_paths() {
            let s = self.writable(layer, l);
            let (lower, upper) = self.llr.split_at_mut(layer);
            let out = &mut upper[0][s * sz..(s + 1) * sz];
            let parent: &[f32] = if layer == 1 {
                channel
            } else {
                let sp = self.path_array[layer - 1][l];
                &lower[layer - 1][sp * 2 * sz..(sp + 1) * 2 * sz]
            };
            let (a, b) = parent.split_at(sz);
            if phase & 1 == 0 {
                for ((o, &x), &y) in out.iter_mut().zip(a).zip(b) {
                    let mag = x.abs().min(y.abs());
                    *o = if (x < 0.0) != (y < 0.0) { -mag } else { mag };
                }
            } else {
                let left = &self.bits[layer][s * sz..(s + 1) * sz];
                for (((o, &x), &y), u) in out.iter_mut().zip(a).zip(b).zip(left) {
                    *o = if u[0] == 0 { y + x } else { y - x };
                }
            }
        }
    }

    fn update_bits(&mut self, layer: usize, phase: usize) {
        let psi = phase >> 1;
        let col = psi & 1;
        let sz = self.size(layer);
        for l in self.active_paths() {
            let s = self.path_array[layer][l];
            let sp = self.writable(layer - 1, l);
            let (lower, upper) = self.bits.split_at_mut(layer);
            let child = &upper[0][s * sz..(s + 1) * sz];
            let parent = &mut lower[layer - 1][sp * 2 * sz..(sp + 1) * 2 * sz];
            let (pa, pb) = parent.split_at_mut(sz);
            for ((c, x), y) in child.iter().zip(pa.iter_mut()).zip(pb.iter_mut()) {
                x[col] = c[0] ^ c[1];
                y[col] = c[1];
            }
        }
        if psi & 1 == 1 {
            self.update_bits(layer - 1, psi);
        }
    }

    fn leaf_llr(&self, l: usize) -> f32 {
        self.llr[self.m][self.path_array[self.m][l]]
    }

    fn set_leaf(&mut self, l: usize, phase: usize, bit: u8) {
        let s = self.writable(self.m, l);
        self.bits[self.m][s][phase & 1] = bit;
    }

    /// Runs the decoder and returns the surviving codeword estimates sorted
    /// by increasing path metric.
    /// Adds the all-zero penalty of a frozen node at `layer` to every path
    /// and records the node's zero codeword.
    fn freeze_node(&mut self, layer: usize, node: usize) {
        let sz = self.size(layer);
        let col = node & 1;
        for l in self.active_paths() {
            let s = self.writable(layer, l);
            let penalty: f64 = self.llr[layer][s * sz..(s + 1) * sz]
                .iter()
                .filter(|&&x| x < 0.0)
                .map(|&x| f64::from(-x))
                .sum();
            self.metric[l] += penalty;
            for b in &mut self.bits[layer][s * sz..(s + 1) * sz] {
                b[col] = 0;
            }
        }
    }

    fn fork_leaf(&mut self, phase: usize, cands: &mut Vec<(f64, usize, u8)>) {
        cands.clear();
        for l in self.active_paths() {
            let llr = self.leaf_llr(l);
            let pm = self.metric[l];
            let pen = f64::from(llr.abs());
            let (p0, p1) = if llr < 0.0 { (pm + pen, pm) } else { (pm, pm + pen) };
            cands.push((p0, l, 0));
            cands.push((p1, l, 1));
        }
        cands.sort_by(|a, b| a.0.total_cmp(&b.0));
        let keep = cands.len().min(self.list);
        let mut kept = vec![[None::<f64>; 2]; self.list];
        for &(pm, l, u) in &cands[..keep] {
            kept[l][usize::from(u)] = Some(pm);
        }
        let paths = self.active_paths();
        for &l in &paths {
            if kept[l] == [None, None] {
                self.kill_path(l);
            }
        }
        for &l in &paths {
            match kept[l] {
                [Some(m0), Some(m1)] => {
                    let c = self.clone_path(l);
                    self.set_leaf(l, phase, 0);
                    self.metric[l] = m0;
                    self.set_leaf(c, phase, 1);
                    self.metric[c] = m1;
                }
                [Some(m0), None] => {
                    self.set_leaf(l, phase, 0);
                    self.metric[l] = m0;
                }
                [None, Some(m1)] => {
                    self.set_leaf(l, phase, 1);
                    self.metric[l] = m1;
                }
                [None, None] => {}
            }
        }
    }

    /// Runs the decoder and returns the surviving codeword estimates sorted
    /// by increasing path metric. With `prune`, maximal all-frozen subtrees
    /// are resolved in one step; under the min-sum metric this gives the same
    /// metrics as visiting their leaves one by one.
    fn run(&mut self, channel: &[f32], frozen: &[bool], prune: bool) -> Vec<Vec<u8>> {
        let n = channel.len();
        let m = self.m;
        let mut frozen_before = vec![0usize; n + 1];
        for (i, &f) in frozen.iter().enumerate() {
            frozen_before[i + 1] = frozen_before[i] + usize::from(f);
        }
        self.assign_initial_path();
        let mut cands: Vec<(f64, usize, u8)> = Vec::with_capacity(2 * self.list);
        let mut phase = 0;
        while phase < n {
            let mut layer = m;
            if prune && frozen[phase] {
                layer = (1..m)
                    .find(|&l| {
                        let sz = 1 << (m - l);
                        phase % sz == 0 && frozen_before[phase + sz] - frozen_before[phase] == sz
                    })
                    .unwrap_or(m);
            }
            let node = phase >> (m - layer);
            self.calc_llr(channel, layer, node);
            if frozen[phase] {
                self.freeze_node(layer, node);
            } else {
                self.fork_leaf(phase, &mut cands);
            }
            if node & 1 == 1 {
                self.update_bits(layer, node);
            }
            phase += 1 << (m - layer);
        }
        let mut paths = self.active_paths();
        paths.sort_by(|&a, &b| self.metric[a].total_cmp(&self.metric[b]).then(a.cmp(&b)));
        paths
            .into_iter()
            .map(|l| {
                let s = self.path_array[0][l];
                self.bits[0][s * n..(s + 1) * n].iter().map(|b| b[0]).collect()
            })
            .collect()
    }
}
