import init, { analyze_table, landscape, grow_trees } from "./pkg/qdtree_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function call(f, out) {
  try {
    return JSON.parse(f());
  } catch (e) {
    out.innerHTML = `<p class="err">${String(e)}</p>`;
    return null;
  }
}

function side(ids) {
  return "{" + ids.join(", ") + "}";
}

function analyze() {
  const out = $("analysis");
  const r = call(() => analyze_table($("table").value, num("p"), num("shots"), BigInt(num("seed"))), out);
  if (!r) return;
  out.innerHTML = `
    <p>exhaustive: ${r.exhaustive.value.toFixed(6)} with ${side(r.exhaustive.first)} vs ${side(r.exhaustive.second)}</p>
    <p>qaoa sample: ${r.qaoa.value.toFixed(6)} with ${side(r.qaoa.first)} vs ${side(r.qaoa.second)}</p>
    <p>⟨f⟩ = ${r.expectation.toFixed(6)} (uniform ${r.mean.toFixed(6)})</p>`;
  const max = Math.max(...r.probabilities);
  const top = Math.max(...r.objective);
  $("probs").innerHTML = r.probabilities
    .map((p, z) => `<div class="${r.objective[z] === top ? "best" : ""}" style="height:${(100 * p) / max}%" title="z=${z} p=${p.toFixed(4)} f=${r.objective[z].toFixed(4)}"></div>`)
    .join("");
}

function scan() {
  const info = $("scaninfo");
  const r = call(() => landscape($("table").value, num("p"), num("grid")), info);
  if (!r) return;
  const n = r.gamma_max.length;
  const canvas = $("heat");
  canvas.width = n;
  canvas.height = n;
  const ctx = canvas.getContext("2d");
  const flat = r.expectation.flat();
  const lo = Math.min(...flat);
  const hi = Math.max(...flat);
  let best = [0, 0];
  r.expectation.forEach((row, i) =>
    row.forEach((v, j) => {
      const t = hi > lo ? (v - lo) / (hi - lo) : 0;
      ctx.fillStyle = `rgb(${Math.round(255 * t)}, ${Math.round(80 + 100 * t)}, ${Math.round(255 * (1 - t))})`;
      // gamma along x, beta upward
      ctx.fillRect(i, n - 1 - j, 1, 1);
      if (v > r.expectation[best[0]][best[1]]) best = [i, j];
    }),
  );
  info.textContent = `max ⟨f⟩ = ${hi.toFixed(6)} at γmax = ${r.gamma_max[best[0]].toFixed(4)}, βmax = ${r.beta_max[best[1]].toFixed(4)}; min ${lo.toFixed(6)}`;
}

function grow() {
  const info = $("growinfo");
  const r = call(() => grow_trees($("schema").value, $("csv").value, num("height"), num("p"), num("shots"), BigInt(num("seed"))), info);
  if (!r) return;
  info.innerHTML = `<p>${r.nodes} nodes, q = ${r.q.toFixed(6)}, training accuracy ${(100 * r.training_accuracy).toFixed(1)}%</p><pre>${r.comparison}</pre>`;
  $("treeout").textContent = r.qaoa_tree;
}

await init();
$("analyze").onclick = analyze;
$("scan").onclick = scan;
$("grow").onclick = grow;
analyze();
