import init, { generate, solve, cluster } from "./pkg/setbranch_demo.js";

const $ = (id) => document.getElementById(id);

function show(out, f) {
  out.classList.remove("err");
  try {
    out.textContent = f();
  } catch (e) {
    out.classList.add("err");
    out.textContent = String(e.message ?? e);
  }
}

await init();

$("gen").onclick = () => {
  try {
    $("instance").value = generate($("spec").value);
  } catch (e) {
    $("solve-out").classList.add("err");
    $("solve-out").textContent = String(e.message ?? e);
  }
};

$("solve").onclick = () =>
  show($("solve-out"), () =>
    solve($("instance").value, $("scheme").value, Number($("threshold").value),
      Number($("kmax").value), Number($("nodes").value)));

$("cluster").onclick = () =>
  show($("cluster-out"), () => cluster($("scores").value, Number($("ckmax").value)));

$("gen").onclick();
