import init, { WebModel } from "./pkg/holo_browser.js";

const SIZE = 512;
const $ = (id) => document.getElementById(id);
let model = null;
let urls = [];

function setImage(id, bytes) {
  const url = URL.createObjectURL(new Blob([bytes], { type: "image/png" }));
  $(id).src = url;
  urls.push(url);
}

function toDisk(ev) {
  const r = ev.target.getBoundingClientRect();
  const x = ((ev.clientX - r.left) / r.width) * 2 - 1;
  const y = 1 - ((ev.clientY - r.top) / r.height) * 2;
  return [x, y];
}

function toPixel(x, y) {
  return [((x + 1) / 2) * SIZE, ((1 - y) / 2) * SIZE];
}

function clearOverlay() {
  $("overlay").getContext("2d").clearRect(0, 0, SIZE, SIZE);
}

function draw() {
  urls.forEach(URL.revokeObjectURL);
  urls = [];
  const log = $("log").checked;
  setImage("domain", model.render("domain", SIZE, log));
  setImage("profile", model.render("profile", 400, false));
  setImage("range", model.render("range", 400, false));
  $("stats").innerHTML =
    `<tr><td>crossings of Re f on the circle</td><td>${model.crossings()}</td></tr>` +
    `<tr><td>Dirichlet energy</td><td>${model.energy().toFixed(4)}</td></tr>` +
    `<tr><td>length of f(circle)</td><td>${model.curveLength().toFixed(4)}</td></tr>`;
  clearOverlay();
}

function train() {
  const n = Number($("n").value);
  const k = Number($("k").value);
  const c = Number($("c").value);
  $("status").textContent = "training...";
  $("status").className = "";
  // let the status repaint before the synchronous solve
  setTimeout(() => {
    try {
      const next = WebModel.train(n, k, c, $("robust").checked);
      if (model) model.free();
      model = next;
      draw();
      $("status").textContent = "";
    } catch (e) {
      $("status").textContent = String(e.message || e);
      $("status").className = "err";
    }
  }, 10);
}

function hover(ev) {
  const [x, y] = toDisk(ev);
  if (x * x + y * y > 1) {
    $("hover").textContent = "";
    return;
  }
  const [re, im] = model.eval(x, y);
  $("hover").textContent =
    `z = ${x.toFixed(3)} ${y < 0 ? "-" : "+"} ${Math.abs(y).toFixed(3)}i, ` +
    `f(z) = ${re.toFixed(3)} ${im < 0 ? "-" : "+"} ${Math.abs(im).toFixed(3)}i`;
}

function attack(ev) {
  const [x, y] = toDisk(ev);
  if (x * x + y * y > 1) return;
  const radius = model.flipRadius(x, y);
  const ctx = $("overlay").getContext("2d");
  const [px, py] = toPixel(x, y);
  ctx.lineWidth = 2;
  ctx.strokeStyle = "#000";
  ctx.fillStyle = "#000";
  ctx.beginPath();
  ctx.arc(px, py, 3, 0, 2 * Math.PI);
  ctx.fill();
  if (radius === undefined) {
    ctx.fillText("no flip", px + 6, py - 6);
    return;
  }
  ctx.beginPath();
  ctx.arc(px, py, (radius * SIZE) / 2, 0, 2 * Math.PI);
  ctx.stroke();
  ctx.fillText(radius.toFixed(3), px + 6, py - 6);
}

await init();
model = new WebModel();
draw();
$("train").addEventListener("click", train);
$("log").addEventListener("change", draw);
$("overlay").addEventListener("mousemove", hover);
$("overlay").addEventListener("click", attack);
train();
