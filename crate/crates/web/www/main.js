import init, { cost_curve, factor, strassen_counts } from "./pkg/panelfact_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function fail(el, msg) {
  el.innerHTML = "";
  const p = document.createElement("div");
  p.className = "err";
  p.textContent = msg;
  el.appendChild(p);
}

function logPlot(canvas, series, xs) {
  const g = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 50;
  g.clearRect(0, 0, w, h);
  const all = series.flatMap((s) => s.ys).filter((y) => y > 0);
  const [y0, y1] = [Math.log10(Math.min(...all)), Math.log10(Math.max(...all))];
  const [x0, x1] = [Math.log10(xs[0]), Math.log10(xs[xs.length - 1] || 2)];
  const px = (x) => pad + ((Math.log10(x) - x0) / (x1 - x0 || 1)) * (w - 2 * pad);
  const py = (y) => h - pad - ((Math.log10(y) - y0) / (y1 - y0 || 1)) * (h - 2 * pad);
  g.strokeStyle = "#999";
  g.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  g.fillStyle = "#444";
  g.fillText("s (log)", w / 2, h - 15);
  g.fillText("1", pad, h - pad + 14);
  g.fillText(String(xs[xs.length - 1]), w - pad - 20, h - pad + 14);
  g.fillText(Math.min(...all).toExponential(2), 2, h - pad);
  g.fillText(Math.max(...all).toExponential(2), 2, pad + 4);
  series.forEach((s, k) => {
    g.strokeStyle = s.color;
    g.beginPath();
    xs.forEach((x, i) => (i ? g.lineTo(px(x), py(s.ys[i])) : g.moveTo(px(x), py(s.ys[i]))));
    g.stroke();
    g.fillStyle = s.color;
    g.fillText(s.name, w - pad - 140, pad + 16 + 14 * k);
  });
}

function plotCost() {
  const out = $("co");
  const v = JSON.parse(cost_curve(num("cn"), num("cd")));
  if (v.error) return fail(out, v.error);
  const xs = v.points.map((p) => p.s);
  logPlot($("cc"), [
    { name: "classical", color: "#1f77b4", ys: v.points.map((p) => p.classical) },
    { name: `strassen:${v.depth}`, color: "#d62728", ys: v.points.map((p) => p.strassen) },
    { name: "strassen panel", color: "#aaa", ys: v.points.map((p) => p.strassen_panel) },
  ], xs);
  out.textContent = `cheapest s: classical ${v.best_classical}, strassen:${v.depth} ${v.best_strassen}`;
}

function heat(g, m, n, ox, oy, size, flushAt, title) {
  const cell = size / n;
  const max = Math.max(...m.map(Math.abs)) || 1;
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      const x = m[i * n + j];
      const t = Math.sqrt(Math.abs(x) / max);
      g.fillStyle = x === 0 ? "#fff" : x > 0 ? `rgba(200,40,40,${t})` : `rgba(40,80,200,${t})`;
      g.fillRect(ox + j * cell, oy + i * cell, Math.ceil(cell), Math.ceil(cell));
    }
  }
  g.strokeStyle = "#2a2";
  for (const c of flushAt) {
    const x = ox + (c - 1) * cell;
    g.beginPath();
    g.moveTo(x, oy);
    g.lineTo(x, oy + size);
    g.stroke();
  }
  g.strokeStyle = "#999";
  g.strokeRect(ox, oy, size, size);
  g.fillStyle = "#222";
  g.fillText(title, ox, oy - 6);
}

function runFactor() {
  const out = $("fo");
  const canvas = $("fc");
  const g = canvas.getContext("2d");
  g.clearRect(0, 0, canvas.width, canvas.height);
  const v = JSON.parse(factor($("fk").value, num("fn"), num("fs"), num("fd"), num("fseed")));
  if (v.error) return fail(out, v.error);
  const total = (o) => o.mults + o.adds;
  let text = `flushes ${v.flushes} at columns [${v.flush_at.join(", ")}]\n`;
  text += `panel ops ${total(v.panel)}, flush ops ${total(v.flush)}, final ops ${total(v.finish)}\n`;
  text += `residual ${v.residual_rel.toExponential(2)}`;
  if (v.orth_rel !== null) text += `, orthogonality ${v.orth_rel.toExponential(2)}`;
  out.textContent = text;
  if (!v.factors.length) return;
  const size = 380;
  v.factors.forEach((m, k) => heat(g, m, v.n, 10 + k * (size + 30), 24, size, v.flush_at, v.names[k]));
}

function runCounts() {
  const out = $("so");
  const v = JSON.parse(strassen_counts(num("sn"), num("sd")));
  if (v.error) return fail(out, v.error);
  const rows = v.map((r) =>
    `<tr><td>${r.depth}</td><td>${r.mults}</td><td>${r.adds}</td><td>${r.mults + r.adds}</td>` +
    `<td>${r.predicted.mults === r.mults && r.predicted.adds === r.adds ? "yes" : "no"}</td></tr>`);
  out.innerHTML = "<table><tr><th>depth</th><th>mults</th><th>adds</th><th>total</th><th>matches model</th></tr>" +
    rows.join("") + "</table>";
}

await init();
$("cgo").onclick = plotCost;
$("fgo").onclick = runFactor;
$("sgo").onclick = runCounts;
plotCost();
runFactor();
runCounts();
