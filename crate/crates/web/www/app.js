import init, { vocabulary, compare, sample_bound } from "./pkg/awe_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function report(el, f) {
  el.classList.remove("err");
  try {
    f();
  } catch (e) {
    el.textContent = String(e);
    el.classList.add("err");
  }
}

function showVocabulary() {
  report($("voc-info"), () => {
    const v = JSON.parse(vocabulary(num("voc-l")));
    const shown = v.walks.length < v.eta ? ` (first ${v.walks.length} shown)` : "";
    $("voc-info").textContent = `η = ${v.eta} anonymous walks of length ${v.length}${shown}`;
    $("voc-list").textContent = v.walks.join("\n");
  });
}

function drawGraph(canvas, n, edges) {
  const g = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  g.clearRect(0, 0, w, h);
  const r = Math.min(w, h) / 2 - 16;
  const pos = [...Array(n).keys()].map((i) => {
    const a = (2 * Math.PI * i) / n - Math.PI / 2;
    return [w / 2 + r * Math.cos(a), h / 2 + r * Math.sin(a)];
  });
  g.strokeStyle = "#999";
  for (const [a, b] of edges) {
    g.beginPath();
    g.moveTo(...pos[a]);
    g.lineTo(...pos[b]);
    g.stroke();
  }
  g.fillStyle = "#333";
  for (const [x, y] of pos) {
    g.beginPath();
    g.arc(x, y, 4, 0, 2 * Math.PI);
    g.fill();
  }
}

function drawBars(canvas, exact, sampled) {
  const g = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  g.clearRect(0, 0, w, h);
  const top = Math.max(...exact, ...sampled, 1e-9);
  const slot = (w - 20) / exact.length;
  const bar = Math.max(slot / 2 - 0.5, 0.5);
  const base = h - 16;
  const draw = (values, dx, colour) => {
    g.fillStyle = colour;
    values.forEach((v, i) => {
      const y = (v / top) * (base - 10);
      g.fillRect(10 + i * slot + dx, base - y, bar, y);
    });
  };
  draw(exact, 0, "#4a7fb5");
  draw(sampled, bar, "#e39b3c");
  g.fillStyle = "#555";
  g.fillText("walk index", w / 2 - 25, h - 3);
  g.fillText(top.toFixed(3), 12, 10);
}

function runCompare() {
  report($("cmp-info"), () => {
    const c = JSON.parse(compare(num("cmp-n"), num("cmp-p"), num("cmp-l"), BigInt(num("cmp-m")), BigInt(num("cmp-seed"))));
    $("cmp-info").textContent =
      `${c.nodes} nodes, ${c.edges.length} edges, η = ${c.eta}; ` +
      `L1 distance between exact and ${c.samples} sampled walks: ${c.l1.toFixed(4)}`;
    drawGraph($("cmp-graph"), c.nodes, c.edges);
    drawBars($("cmp-bars"), c.exact, c.sampled);
  });
}

function plotBound() {
  report($("bnd-info"), () => {
    const b = JSON.parse(sample_bound(num("bnd-d"), num("bnd-l")));
    const canvas = $("bnd-plot");
    const g = canvas.getContext("2d");
    const { width: w, height: h } = canvas;
    g.clearRect(0, 0, w, h);
    const logs = b.samples.map((m) => Math.log10(m));
    const lo = Math.floor(Math.min(...logs));
    const hi = Math.ceil(Math.max(...logs));
    const x = (e) => 50 + ((e - b.epsilon[0]) / (b.epsilon.at(-1) - b.epsilon[0])) * (w - 70);
    const y = (lm) => h - 30 - ((lm - lo) / Math.max(hi - lo, 1)) * (h - 50);
    g.strokeStyle = "#ccc";
    g.fillStyle = "#555";
    for (let k = lo; k <= hi; k++) {
      g.beginPath();
      g.moveTo(50, y(k));
      g.lineTo(w - 20, y(k));
      g.stroke();
      g.fillText(`1e${k}`, 8, y(k) + 4);
    }
    g.fillText("ε", w / 2, h - 8);
    g.strokeStyle = "#4a7fb5";
    g.lineWidth = 2;
    g.beginPath();
    b.epsilon.forEach((e, i) => (i ? g.lineTo(x(e), y(logs[i])) : g.moveTo(x(e), y(logs[i]))));
    g.stroke();
    g.lineWidth = 1;
    const i = b.epsilon.findIndex((e) => Math.abs(e - 0.1) < 1e-12);
    const at = i >= 0 ? `; ε = 0.1 needs m = ${b.samples[i]}` : "";
    $("bnd-info").textContent = `η = ${b.eta}, δ = ${b.delta}${at}; ε = 0.5 needs m = ${b.samples.at(-1)}`;
  });
}

await init();
$("voc-go").onclick = showVocabulary;
$("cmp-go").onclick = runCompare;
$("bnd-go").onclick = plotBound;
showVocabulary();
runCompare();
plotBound();
