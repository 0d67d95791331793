import init, { featurize, fnc1_from_matrix, train_toy } from "./pkg/stance_web.js";

const LABELS = ["agree", "disagree", "discuss", "unrelated"];
const PRESET = [838, 12, 939, 114, 179, 46, 356, 116, 523, 46, 3633, 262, 53, 3, 330, 17963];
const $ = (id) => document.getElementById(id);

function tokens(all, kept) {
  const keep = new Set(kept);
  return all.map((t) => `<span class="tok${keep.has(t) ? "" : " stop"}">${t}</span>`).join("");
}

function showFeatures() {
  const r = JSON.parse(featurize($("headline").value, $("body").value));
  $("feat-out").innerHTML =
    `<p>headline: ${tokens(r.headline_tokens, r.headline_kept)}</p>` +
    `<p>body: ${tokens(r.body_tokens, r.body_kept)}</p>` +
    `<pre>headline TF ${JSON.stringify(r.headline_tf)}\nbody TF     ${JSON.stringify(r.body_tf)}\n` +
    `TF-IDF cosine ${r.cosine.toFixed(4)}   feature dimension ${r.feature_dim}</pre>`;
}

function buildMatrix() {
  let html = "<tr><th></th>" + LABELS.map((l) => `<th>${l}</th>`).join("") + "</tr>";
  LABELS.forEach((g, i) => {
    html += `<tr><th>${g}</th>`;
    for (let j = 0; j < 4; j++) html += `<td><input type="number" min="0" value="${PRESET[4 * i + j]}"></td>`;
    html += "</tr>";
  });
  $("matrix").innerHTML = html;
}

function showScore() {
  const cells = [...$("matrix").querySelectorAll("input")].map((e) => Math.max(0, parseInt(e.value, 10) || 0));
  const r = JSON.parse(fnc1_from_matrix(new Uint32Array(cells)));
  $("score-out").textContent = r.error ? `error: ${r.error}` : r.text;
}

function plot(losses) {
  const c = $("loss"), g = c.getContext("2d");
  g.clearRect(0, 0, c.width, c.height);
  if (!losses.length) return;
  const pad = 30, max = Math.max(...losses), w = c.width - 2 * pad, h = c.height - 2 * pad;
  g.strokeStyle = "#999";
  g.strokeRect(pad, pad, w, h);
  g.fillStyle = "#555";
  g.fillText(max.toFixed(3), 2, pad + 4);
  g.fillText("0", 2, pad + h);
  g.fillText(`epoch ${losses.length}`, pad + w - 50, pad + h + 16);
  g.strokeStyle = "#2b6cb0";
  g.beginPath();
  losses.forEach((l, i) => {
    const x = pad + (losses.length > 1 ? (i / (losses.length - 1)) * w : 0);
    const y = pad + h - (l / max) * h;
    i ? g.lineTo(x, y) : g.moveTo(x, y);
  });
  g.stroke();
}

function runTraining() {
  $("train-status").textContent = "training...";
  setTimeout(() => {
    const t0 = performance.now();
    const num = (id) => parseFloat($(id).value);
    const r = JSON.parse(train_toy(num("lr"), num("keep"), num("clip"), num("l2"), num("epochs") | 0, num("seed") | 0));
    if (r.error) {
      $("train-status").textContent = `error: ${r.error}`;
      return;
    }
    $("train-status").textContent = `done in ${((performance.now() - t0) / 1000).toFixed(2)}s`;
    plot(r.losses);
    const rows = r.samples.map((s) =>
      `${s.predicted.padEnd(10)} (gold ${s.gold.padEnd(9)}) ${s.probs.map((p) => p.toFixed(3)).join(" ")}  ${s.headline}`);
    $("train-out").textContent =
      `${r.instances} instances, input dimension ${r.input_dim}\n` +
      `final loss ${r.losses[r.losses.length - 1].toFixed(4)}, training accuracy ${r.train_accuracy.toFixed(2)}%\n\n` +
      rows.join("\n");
  }, 10);
}

await init();
buildMatrix();
$("featurize").onclick = showFeatures;
$("score").onclick = showScore;
$("train").onclick = runTraining;
showFeatures();
showScore();
