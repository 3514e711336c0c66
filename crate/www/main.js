// Demo page logic: three panels (simulate, infer, forecast) wired to the
// wasm module. All drawing is plain canvas; no dependencies.

import init, { describe, simulate, infer, forecast } from "./pkg/plantsis_wasm.js";

let net;
try {
  await init();
  net = JSON.parse(describe());
} catch (e) {
  const err = document.getElementById("load-error");
  err.hidden = false;
  err.textContent =
    "wasm module not found — build it with: " +
    "wasm-pack build crates/wasm --target web --out-dir ../../www/pkg  (" + e + ")";
  throw e;
}
document.getElementById("app").hidden = false;

const planted = net.node_count - net.unplanted.length;
const unplanted = new Set(net.unplanted);

// ---------------------------------------------------------------- drawing

const PAD = 10;

function cellRect(canvas, node) {
  const w = (canvas.width - 2 * PAD) / net.cols;
  const h = (canvas.height - 2 * PAD) / net.rows;
  const row = Math.floor(node / net.cols);
  const col = node % net.cols;
  return { x: PAD + col * w, y: PAD + row * h, w, h };
}

function seasonOf(label) {
  const m = Number(label.slice(5));
  return m >= 3 && m <= 8 ? "winter" : "summer";
}

// Grid of subsections. `fill(node)` returns a CSS color; cleared nodes get
// a cross, and edges beyond grid adjacency are drawn as faint arcs so the
// long-range links are visible.
function drawGrid(canvas, fill, cleared, monthLabel) {
  const ctx = canvas.getContext("2d");
  ctx.fillStyle = monthLabel && seasonOf(monthLabel) === "winter" ? "#eef4fb" : "#fff8ee";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  for (let node = 0; node < net.node_count; node++) {
    const { x, y, w, h } = cellRect(canvas, node);
    ctx.fillStyle = unplanted.has(node) ? "#d8d8d8" : fill(node);
    ctx.fillRect(x + 1, y + 1, w - 2, h - 2);
    if (cleared && cleared.has(node)) {
      ctx.strokeStyle = "#555";
      ctx.lineWidth = 1.5;
      ctx.beginPath();
      ctx.moveTo(x + 5, y + 5);
      ctx.lineTo(x + w - 5, y + h - 5);
      ctx.moveTo(x + w - 5, y + 5);
      ctx.lineTo(x + 5, y + h - 5);
      ctx.stroke();
    }
  }
  ctx.strokeStyle = "rgba(60,60,120,0.35)";
  ctx.lineWidth = 1;
  for (const [u, v] of net.edges) {
    const ru = Math.floor(u / net.cols), cu = u % net.cols;
    const rv = Math.floor(v / net.cols), cv = v % net.cols;
    const gridAdjacent = Math.abs(ru - rv) + Math.abs(cu - cv) === 1;
    if (gridAdjacent) continue;
    const a = cellRect(canvas, u), b = cellRect(canvas, v);
    ctx.beginPath();
    ctx.moveTo(a.x + a.w / 2, a.y + a.h / 2);
    ctx.quadraticCurveTo(
      (a.x + b.x + a.w) / 2 + (a.y - b.y) * 0.2,
      (a.y + b.y + a.h) / 2 + (b.x - a.x) * 0.2,
      b.x + b.w / 2, b.y + b.h / 2,
    );
    ctx.stroke();
  }
}

function infectionShade(p) {
  return p <= 0 ? "#e4f0e4" : `rgba(198, 40, 40, ${0.15 + 0.85 * p})`;
}

// Line chart of one or more {label, values, color, dashed} series over
// month labels, y fixed to [0, 1].
function drawCurves(canvas, monthLabels, series) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const left = 34, bottom = 24, top = 12, right = 8;
  const w = canvas.width - left - right;
  const h = canvas.height - top - bottom;
  ctx.strokeStyle = "#99a";
  ctx.fillStyle = "#667";
  ctx.font = "11px system-ui";
  ctx.beginPath();
  ctx.moveTo(left, top);
  ctx.lineTo(left, top + h);
  ctx.lineTo(left + w, top + h);
  ctx.stroke();
  for (const frac of [0, 0.5, 1]) {
    const y = top + h - frac * h;
    ctx.fillText(frac.toFixed(1), 6, y + 4);
  }
  const step = Math.max(1, Math.ceil(monthLabels.length / 6));
  for (let t = 0; t < monthLabels.length; t += step) {
    const x = left + (w * t) / Math.max(1, monthLabels.length - 1);
    ctx.fillText(monthLabels[t], x - 18, canvas.height - 8);
  }
  let legendY = top + 10;
  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.setLineDash(s.dashed ? [5, 4] : []);
    ctx.lineWidth = 1.6;
    ctx.beginPath();
    s.values.forEach((v, t) => {
      const x = left + (w * t) / Math.max(1, s.values.length - 1);
      const y = top + h - Math.min(1, v) * h;
      t === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y);
    });
    ctx.stroke();
    ctx.setLineDash([]);
    ctx.fillStyle = s.color;
    ctx.fillText(s.label, left + 8, legendY);
    legendY += 14;
    ctx.fillStyle = "#667";
  }
}

function drawHistogram(canvas, mass, lo, hi, truth, name) {
  const ctx = canvas.getContext("2d");
  const bottom = 26, top = 16;
  const h = canvas.height - top - bottom;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.font = "11px system-ui";
  ctx.fillStyle = "#222";
  ctx.fillText(name, 6, 12);
  const peak = Math.max(...mass, 1e-9);
  const barW = canvas.width / mass.length;
  ctx.fillStyle = "rgba(34, 102, 170, 0.7)";
  mass.forEach((m, i) => {
    const barH = (m / peak) * h;
    ctx.fillRect(i * barW + 1, top + h - barH, barW - 2, barH);
  });
  ctx.strokeStyle = "#c33";
  ctx.setLineDash([4, 3]);
  ctx.beginPath();
  const tx = ((truth - lo) / (hi - lo)) * canvas.width;
  ctx.moveTo(tx, top);
  ctx.lineTo(tx, top + h);
  ctx.stroke();
  ctx.setLineDash([]);
  ctx.fillStyle = "#667";
  ctx.fillText(lo.toPrecision(2), 2, canvas.height - 8);
  const hiText = hi.toPrecision(2);
  ctx.fillText(hiText, canvas.width - ctx.measureText(hiText).width - 2, canvas.height - 8);
}

// Runs `work` after the browser has painted the status text.
function busy(statusEl, button, text, work) {
  statusEl.textContent = text;
  button.disabled = true;
  setTimeout(() => {
    try {
      work();
      statusEl.textContent = "";
    } catch (e) {
      statusEl.textContent = String(e);
    } finally {
      button.disabled = false;
    }
  }, 30);
}

const $ = (id) => document.getElementById(id);

// --------------------------------------------------------------- simulate

const paramInputs = [];
for (let p = 0; p < 6; p++) {
  const label = document.createElement("label");
  label.textContent = net.param_names[p] + " ";
  const input = document.createElement("input");
  input.type = "number";
  input.step = "0.001";
  input.min = "0";
  input.max = "1";
  input.value = net.true_params[p];
  label.appendChild(input);
  $("sim-params").appendChild(label);
  paramInputs.push(input);
}

let simTraj = null;
let simTimer = null;

function simShowFrame(f) {
  $("sim-frame").value = f;
  $("sim-month").textContent = `${simTraj.months[f]} (${seasonOf(simTraj.months[f])})`;
  const infected = new Set(simTraj.snapshots[f]);
  drawGrid($("sim-grid"), (n) => (infected.has(n) ? "#c33" : "#e4f0e4"), null, simTraj.months[f]);
}

function simStop() {
  clearInterval(simTimer);
  simTimer = null;
  $("sim-play").textContent = "play";
}

$("sim-run").addEventListener("click", () => {
  simStop();
  busy($("sim-month"), $("sim-run"), "running…", () => {
    const params = paramInputs.map((i) => Number(i.value));
    simTraj = JSON.parse(
      simulate(JSON.stringify(params), Number($("sim-horizon").value), Number($("sim-seed").value)),
    );
    const frame = $("sim-frame");
    frame.max = simTraj.months.length - 1;
    frame.disabled = false;
    $("sim-play").disabled = false;
    simShowFrame(0);
    const prevalence = simTraj.snapshots.map((s) => s.length / planted);
    const observed = net.observed.snapshots.map((s) => s.length / planted);
    drawCurves($("sim-curve"), simTraj.months, [
      { label: "simulated prevalence", values: prevalence, color: "#2a6" },
      { label: "observed 2014–2018", values: observed, color: "#888", dashed: true },
    ]);
  });
});

$("sim-frame").addEventListener("input", () => simShowFrame(Number($("sim-frame").value)));

$("sim-play").addEventListener("click", () => {
  if (simTimer) return simStop();
  $("sim-play").textContent = "pause";
  simTimer = setInterval(() => {
    const next = (Number($("sim-frame").value) + 1) % simTraj.months.length;
    simShowFrame(next);
    if (next === simTraj.months.length - 1) simStop();
  }, 170);
});

// ------------------------------------------------------------------ infer

let posteriorDraws = null;

$("abc-run").addEventListener("click", () => {
  busy($("abc-status"), $("abc-run"), "simulating proposals…", () => {
    const res = JSON.parse(
      infer(Number($("abc-attempts").value), Number($("abc-epsilon").value), Number($("abc-seed").value)),
    );
    $("abc-result").hidden = false;
    if (res.accepted === 0) {
      $("abc-summary").textContent =
        `0 of ${res.attempted} proposals accepted at ε = ${res.epsilon} — raise the tolerance.`;
      $("abc-histograms").replaceChildren();
      return;
    }
    posteriorDraws = res.draws;
    const meanText = res.means
      .map((m, p) => `${net.param_names[p]} ${m.toFixed(4)} (true ${net.true_params[p]})`)
      .join(" · ");
    $("abc-summary").textContent =
      `${res.accepted} of ${res.attempted} proposals accepted ` +
      `(rate ${(100 * res.acceptance_rate).toFixed(2)}%). Posterior means: ${meanText}`;
    $("abc-histograms").replaceChildren();
    res.histograms.forEach((mass, p) => {
      const canvas = document.createElement("canvas");
      canvas.width = 220;
      canvas.height = 150;
      $("abc-histograms").appendChild(canvas);
      drawHistogram(canvas, mass, net.prior_lower[p], net.prior_upper[p], net.true_params[p], net.param_names[p]);
    });
  });
});

// --------------------------------------------------------------- forecast

const cleared = new Set();
let fcRes = null;
const fcRuns = [];
const FC_COLORS = ["#2a6", "#26a", "#a62"];

function fcShowFrame(f) {
  $("fc-frame").value = f;
  $("fc-month").textContent = fcRes
    ? `${fcRes.months[f]} (${seasonOf(fcRes.months[f])})`
    : "—";
  const probs = fcRes ? fcRes.per_node[f] : null;
  const lastObserved = new Set(net.observed.snapshots[net.observed.snapshots.length - 1]);
  drawGrid(
    $("fc-grid"),
    (n) => infectionShade(probs ? probs[n] : lastObserved.has(n) ? 1 : 0),
    cleared,
    fcRes ? fcRes.months[f] : null,
  );
}

$("fc-grid").addEventListener("click", (ev) => {
  const rect = ev.target.getBoundingClientRect();
  const x = ((ev.clientX - rect.left) * ev.target.width) / rect.width;
  const y = ((ev.clientY - rect.top) * ev.target.height) / rect.height;
  const col = Math.floor((x - PAD) / ((ev.target.width - 2 * PAD) / net.cols));
  const row = Math.floor((y - PAD) / ((ev.target.height - 2 * PAD) / net.rows));
  if (col < 0 || col >= net.cols || row < 0 || row >= net.rows) return;
  const node = row * net.cols + col;
  if (unplanted.has(node)) return;
  cleared.has(node) ? cleared.delete(node) : cleared.add(node);
  fcShowFrame(Number($("fc-frame").value));
});

$("fc-clear").addEventListener("click", () => {
  cleared.clear();
  fcShowFrame(Number($("fc-frame").value));
});

$("fc-run").addEventListener("click", () => {
  busy($("fc-status"), $("fc-run"), "forecasting…", () => {
    const draws = posteriorDraws ?? [net.true_params];
    fcRes = JSON.parse(
      forecast(
        JSON.stringify(draws),
        $("fc-season").value,
        JSON.stringify([...cleared]),
        Number($("fc-horizon").value),
        Number($("fc-replicates").value),
        Number($("fc-seed").value),
      ),
    );
    const frame = $("fc-frame");
    frame.max = fcRes.months.length - 1;
    frame.disabled = false;
    fcShowFrame(fcRes.months.length - 1);
    fcRuns.push({
      label: `${$("fc-season").value}, ${cleared.size} cleared`,
      values: fcRes.mean,
      months: fcRes.months,
    });
    if (fcRuns.length > FC_COLORS.length) fcRuns.shift();
    drawCurves(
      $("fc-curve"),
      fcRuns[fcRuns.length - 1].months,
      fcRuns.map((r, i) => ({ label: r.label, values: r.values, color: FC_COLORS[i] })),
    );
    const source = posteriorDraws ? `${draws.length} posterior draws` : "the true rates";
    $("fc-summary").textContent =
      `Mean prevalence over the final year: ${fcRes.steady_state_mean.toFixed(4)} (from ${source}).`;
  });
});

// ------------------------------------------------------------ first paint

drawGrid($("sim-grid"), (n) => (net.initial.includes(n) ? "#c33" : "#e4f0e4"), null, net.observed.months[0]);
$("sim-month").textContent = `${net.observed.months[0]} (initial infections)`;
fcShowFrame(0);
