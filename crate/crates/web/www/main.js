import init, { distance_field, log_kernel_heatmap, path_length_profile } from "./pkg/bergman_web.js";

const PRESETS = {
  disc: { outer: { center: [0, 0], radius: 1 } },
  punctured: { outer: { center: [0, 0], radius: 1 }, punctures: [[0, 0]] },
  holes: {
    outer: { center: [0, 0], radius: 1 },
    holes: [
      { center: [-0.5, 0], radius: 0.125 },
      { center: [-0.75, 0], radius: 0.0625 },
      { center: [-0.875, 0], radius: 0.03125 },
    ],
  },
  annulus: { outer: { center: [0, 0], radius: 1 }, holes: [{ center: [0, 0], radius: 0.4 }] },
};

const $ = (id) => document.getElementById(id);
const field = $("field");
const profile = $("profile");
let clicks = [];

function status(msg, err = false) {
  $("status").textContent = msg;
  $("status").className = err ? "err" : "";
}

function domain() {
  const text = $("domain").value;
  return { text, doc: JSON.parse(text) };
}

function num(id) {
  return Number($(id).value);
}

// Pixel grid spans the square of half-width 1.05·R around the outer centre.
function frame(doc) {
  const [cx, cy] = doc.outer.center;
  return { cx, cy, r: doc.outer.radius * 1.05 };
}

function toPlane(doc, px, py) {
  const { cx, cy, r } = frame(doc);
  return [cx - r + (2 * r * px) / field.width, cy + r - (2 * r * py) / field.height];
}

function toCanvas(doc, x, y) {
  const { cx, cy, r } = frame(doc);
  return [((x - cx + r) / (2 * r)) * field.width, ((cy + r - y) / (2 * r)) * field.height];
}

function paint(values, n, colour) {
  const finite = values.filter(Number.isFinite);
  const lo = Math.min(...finite);
  const hi = Math.max(...finite);
  const img = new ImageData(n, n);
  values.forEach((v, i) => {
    const [r, g, b] = Number.isFinite(v) ? colour((v - lo) / (hi - lo || 1), v) : [255, 255, 255];
    img.data.set([r, g, b, 255], 4 * i);
  });
  const tmp = new OffscreenCanvas(n, n);
  tmp.getContext("2d").putImageData(img, 0, 0);
  const ctx = field.getContext("2d");
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(tmp, 0, 0, field.width, field.height);
  return [lo, hi];
}

function run(label, f) {
  status(`${label}…`);
  setTimeout(() => {
    const t0 = performance.now();
    try {
      const msg = f();
      status(`${msg} (${((performance.now() - t0) / 1000).toFixed(2)} s)`);
    } catch (e) {
      status(String(e.message ?? e), true);
    }
  }, 10);
}

$("dist").onclick = () =>
  run("signed distance", () => {
    const { text } = domain();
    const n = num("pixels");
    const v = distance_field(text, n, n);
    const [lo, hi] = paint(v, n, (s, x) => (x >= 0 ? [40, 60 + 195 * s, 90 + 160 * s] : [200, 200, 200]));
    clicks = [];
    return `signed distance in [${lo.toFixed(3)}, ${hi.toFixed(3)}]`;
  });

$("heat").onclick = () =>
  run("kernel", () => {
    const { text } = domain();
    const n = num("pixels");
    const v = log_kernel_heatmap(text, num("alpha"), num("degree"), num("depth"), n, n);
    const [lo, hi] = paint(v, n, (s) => [255 * s, 80 + 100 * (1 - Math.abs(2 * s - 1)), 255 * (1 - s)]);
    clicks = [];
    return `log K(z,z) in [${lo.toFixed(3)}, ${hi.toFixed(3)}]`;
  });

field.onclick = (ev) => {
  const { text, doc } = domain();
  const rect = field.getBoundingClientRect();
  const p = toPlane(doc, ev.clientX - rect.left, ev.clientY - rect.top);
  clicks.push(p);
  const ctx = field.getContext("2d");
  const [x, y] = toCanvas(doc, ...p);
  ctx.fillStyle = "#000";
  ctx.beginPath();
  ctx.arc(x, y, 3, 0, 2 * Math.PI);
  ctx.fill();
  if (clicks.length < 2) return;
  const [a, b] = clicks;
  clicks = [];
  const [ax, ay] = toCanvas(doc, ...a);
  ctx.beginPath();
  ctx.moveTo(ax, ay);
  ctx.lineTo(x, y);
  ctx.stroke();
  run("path length", () => {
    const len = path_length_profile(text, num("alpha"), num("degree"), num("depth"), a[0], a[1], b[0], b[1], 200);
    plot(len);
    return `Bergman length ${len[len.length - 1].toFixed(4)}, Euclidean ${Math.hypot(b[0] - a[0], b[1] - a[1]).toFixed(4)}`;
  });
};

function plot(len) {
  const ctx = profile.getContext("2d");
  const { width: w, height: h } = profile;
  ctx.clearRect(0, 0, w, h);
  const top = len[len.length - 1] || 1;
  ctx.strokeStyle = "#999";
  ctx.strokeRect(30, 10, w - 40, h - 40);
  ctx.fillStyle = "#000";
  ctx.fillText("0", 18, h - 30);
  ctx.fillText(top.toFixed(3), 0, 18);
  ctx.fillText("arc parameter s", w / 2 - 40, h - 8);
  ctx.strokeStyle = "#c33";
  ctx.beginPath();
  len.forEach((v, i) => {
    const x = 30 + ((w - 40) * i) / (len.length - 1);
    const y = h - 30 - ((h - 40) * v) / top;
    i ? ctx.lineTo(x, y) : ctx.moveTo(x, y);
  });
  ctx.stroke();
}

$("preset").onchange = () => {
  $("domain").value = JSON.stringify(PRESETS[$("preset").value]);
  clicks = [];
};

await init();
$("preset").onchange();
$("dist").onclick();
