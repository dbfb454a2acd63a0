import init, { presets, solve_opb, explore_constraint, restart_schedule } from "./pkg/pbcdcl_wasm.js";

const $ = (id) => document.getElementById(id);

function pigeonhole(pigeons, holes) {
  const x = (p, h) => `x${p * holes + h + 1}`;
  const lines = [];
  for (let p = 0; p < pigeons; p++) {
    lines.push([...Array(holes).keys()].map((h) => `+1 ${x(p, h)}`).join(" ") + " >= 1 ;");
  }
  for (let h = 0; h < holes; h++) {
    lines.push([...Array(pigeons).keys()].map((p) => `+1 ${x(p, h)}`).join(" ") + " <= 1 ;");
  }
  return lines.join("\n");
}

function showSolve() {
  const r = JSON.parse(solve_opb($("opb").value, $("preset").value, Number($("limit").value) || 1));
  if (r.error) {
    $("solve-out").textContent = "error: " + r.error;
    return;
  }
  const lines = r.bounds.map((b) => "o " + b);
  lines.push("s " + r.status);
  if (r.model) lines.push("v " + r.model.join(" "));
  lines.push("", "c " + r.config);
  for (const [k, v] of Object.entries(r.stats)) lines.push(`c ${k} ${v}`);
  $("solve-out").textContent = lines.join("\n");
}

function showExplore() {
  const r = JSON.parse(explore_constraint($("constraint").value, $("assignment").value));
  if (r.error) {
    $("explore-out").textContent = "error: " + r.error;
    return;
  }
  const out = ["assignment: " + (r.assignment.join(" ") || "(empty)")];
  for (const c of r.normalized) {
    out.push(
      "",
      c.constraint,
      `  degree ${c.degree}, degree bits ${c.degreeBits}, slack ${c.slack}` + (c.conflicting ? " (conflicting)" : ""),
      "  propagates: " + (c.propagates.join(" ") || "nothing"),
      "  effective literals: " + (c.effective ? c.effective.join(" ") : "n/a (neither conflicting nor propagating)"),
      "  " + Object.entries(c.lbd).map(([k, v]) => `${k} ${v ?? "n/a"}`).join(", "),
    );
    for (const [k, v] of Object.entries(c.bump)) out.push(`  ${k} bumps: ${v.join(" ") || "nothing"}`);
  }
  $("explore-out").textContent = out.join("\n");
}

function drawSchedule() {
  const n = Number($("count").value);
  $("count-value").textContent = n;
  const s = JSON.parse(restart_schedule(n));
  const canvas = $("schedule");
  const g = canvas.getContext("2d");
  g.clearRect(0, 0, canvas.width, canvas.height);
  const max = Math.max(...s.luby, ...s.picosat);
  const pad = 30;
  const w = (canvas.width - 2 * pad) / n;
  const h = (v) => ((canvas.height - 2 * pad) * v) / max;
  g.fillStyle = "#555";
  g.fillText(String(max), 2, pad);
  g.fillText("0", 2, canvas.height - pad);
  [["luby", "#1565c0", 0], ["picosat", "#c62828", 0.5]].forEach(([key, color, offset]) => {
    g.fillStyle = color;
    s[key].forEach((v, i) => g.fillRect(pad + (i + offset) * w, canvas.height - pad - h(v), w / 2 - 1, h(v)));
  });
}

await init();
for (const p of JSON.parse(presets())) $("preset").add(new Option(p, p));
$("preset").value = "roundingsat-best";
$("run").onclick = showSolve;
$("php").onclick = () => {
  $("opb").value = pigeonhole(8, 7);
};
$("constraint").oninput = showExplore;
$("assignment").oninput = showExplore;
$("count").oninput = drawSchedule;
showExplore();
drawSchedule();
