//! Adaptive Gauss-Kronrod (7/15) quadrature.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = r * XGK[j];
        let s = f(c - x) + f(c + x);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * r, ((kronrod - gauss) * r).abs())
}

/// Maximum number of subintervals before giving up on `tol`.
const MAX_INTERVALS: usize = 4000;

struct Piece {
    a: f64,
    b: f64,
    val: f64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`, bisecting the
/// subinterval with the largest error estimate first. Stops early once the
/// error estimate reaches roundoff level or the interval budget is spent.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let piece = |a: f64, b: f64| {
        let (val, err) = gk15(&f, a, b);
        Piece { a, b, val, err }
    };
    let mut heap = std::collections::BinaryHeap::new();
    let first = piece(a, b);
    let (mut total, mut err) = (first.val, first.err);
    heap.push(first);
    while err > tol && err > 1e-15 * total.abs() && heap.len() < MAX_INTERVALS {
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            heap.push(worst);
            break;
        }
        let (l, r) = (piece(worst.a, mid), piece(mid, worst.b));
        total += l.val + r.val - worst.val;
        err += l.err + r.err - worst.err;
        heap.push(l);
        heap.push(r);
    }
    // re-sum to shed the drift of the running updates
    heap.iter().map(|p| p.val).sum()
}

/// Running integral `int_a^t f` tabulated on uniform panels; a lookup adds
/// one Gauss-Kronrod panel from the nearest node below `t`.
#[derive(Clone, Debug)]
pub struct Cumulative {
    a: f64,
    h: f64,
    nodes: Vec<f64>,
}

impl Cumulative {
    pub fn new<E, F>(f: &F, a: f64, b: f64, panels: usize) -> Result<Self, E>
    where
        F: Fn(f64) -> Result<f64, E>,
    {
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels + 1);
        nodes.push(0.0);
        let mut acc = 0.0;
        for k in 0..panels {
            let x0 = a + k as f64 * h;
            let x1 = if k + 1 == panels { b } else { x0 + h };
            acc += try_panel(f, x0, x1)?;
            nodes.push(acc);
        }
        Ok(Self { a, h, nodes })
    }

    /// `int_a^t f`, for `t` inside the tabulated range (clamped otherwise).
    pub fn at<E, F>(&self, f: &F, t: f64) -> Result<f64, E>
    where
        F: Fn(f64) -> Result<f64, E>,
    {
        let last = self.nodes.len() - 1;
        let k = (((t - self.a) / self.h).floor().max(0.0) as usize).min(last);
        let x0 = self.a + k as f64 * self.h;
        Ok(self.nodes[k] + try_panel(f, x0, t)?)
    }
}

fn try_panel<E, F>(f: &F, a: f64, b: f64) -> Result<f64, E>
where
    F: Fn(f64) -> Result<f64, E>,
{
    if a == b {
        return Ok(0.0);
    }
    let err = std::cell::RefCell::new(None);
    let (v, _) = gk15(
        &|x| match f(x) {
            Ok(y) => y,
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        a,
        b,
    );
    match err.into_inner() {
        Some(e) => Err(e),
        None => Ok(v),
    }
}
