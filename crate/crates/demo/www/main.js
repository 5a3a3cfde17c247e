import init, { densityCurve, ratioProfile, certificate } from "./pkg/heavytail_demo.js";

const $ = (id) => document.getElementById(id);

function plot(canvas, xs, ys, mark) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 32;
  ctx.clearRect(0, 0, w, h);
  const xmin = Math.min(...xs), xmax = Math.max(...xs);
  let ymin = Math.min(...ys), ymax = Math.max(...ys);
  if (ymax - ymin < 1e-12) { ymin -= 0.5; ymax += 0.5; }
  const X = (x) => pad + (w - 2 * pad) * (x - xmin) / (xmax - xmin || 1);
  const Y = (y) => h - pad - (h - 2 * pad) * (y - ymin) / (ymax - ymin);

  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(pad, h - pad); ctx.lineTo(w - pad, h - pad);
  ctx.moveTo(pad, pad); ctx.lineTo(pad, h - pad);
  ctx.stroke();
  ctx.fillStyle = "#555";
  ctx.font = "11px sans-serif";
  ctx.fillText(xmin.toFixed(2), pad, h - pad + 14);
  ctx.fillText(xmax.toFixed(2), w - pad - 24, h - pad + 14);
  ctx.fillText(ymax.toFixed(3), 2, pad + 4);
  ctx.fillText(ymin.toFixed(3), 2, h - pad);

  ctx.strokeStyle = "#1f5fa8";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  xs.forEach((x, i) => (i ? ctx.lineTo(X(x), Y(ys[i])) : ctx.moveTo(X(x), Y(ys[i]))));
  ctx.stroke();

  if (mark) {
    ctx.fillStyle = "#c0392b";
    ctx.beginPath();
    ctx.arc(X(mark[0]), Y(mark[1]), 4, 0, 2 * Math.PI);
    ctx.fill();
  }
}

function drawDensity() {
  const s = Number($("s").value);
  $("s-val").textContent = `s = ${s.toFixed(2)}, apex at ${(1 - 2 * s).toFixed(2)}`;
  const xy = densityCurve(s, 400);
  const xs = [], ys = [];
  for (let i = 0; i < xy.length; i += 2) { xs.push(xy[i]); ys.push(xy[i + 1]); }
  plot($("density"), xs, ys);
}

function drawRatio() {
  try {
    const r = JSON.parse(ratioProfile(Number($("p").value), Number($("q").value), 201));
    plot($("ratio"), r.s, r.value, [r.best_s, r.best_value]);
    $("scan-val").textContent = `max ${r.best_value.toFixed(10)} at s = ${r.best_s}`;
  } catch (e) {
    $("scan-val").textContent = String(e.message ?? e);
  }
}

function runCertificate() {
  try {
    const c = JSON.parse(certificate(Number($("cq").value)));
    $("cert-out").textContent = JSON.stringify(c, null, 2);
  } catch (e) {
    $("cert-out").textContent = String(e.message ?? e);
  }
}

await init();
$("s").addEventListener("input", drawDensity);
$("scan").addEventListener("click", drawRatio);
$("cert").addEventListener("click", runCertificate);
drawDensity();
drawRatio();
runCertificate();
