// Bootstrap: capability checklist + reference-input pickers on the left,
// composer canvas in the middle, run monitor on the right.

import { GatewayClient } from "./api";
import { PipelineCanvas } from "./canvas";
import { RunMonitor } from "./monitor";
import { AppStore } from "./store";

const ROLE_TYPES: Record<string, string> = {
  identity: "PersonImage",
  garment: "GarmentRef",
  makeup_ref: "MakeupRef",
  object_ref: "ObjectRef",
  landmarks: "LandmarkSet",
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  props: Partial<HTMLElementTagNameMap[K]> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  Object.assign(node, props);
  node.append(...children);
  return node;
}

async function boot() {
  const base = new URLSearchParams(location.search).get("gateway")
    ?? location.origin.replace(/:\d+$/, ":8700");
  const client = new GatewayClient(base);
  const store = new AppStore(client);

  const sidebar = document.getElementById("sidebar")!;
  const canvasHost = document.getElementById("canvas")! as unknown as SVGSVGElement;
  const monitorHost = document.getElementById("monitor")!;

  new PipelineCanvas(canvasHost, store);
  new RunMonitor(monitorHost, store);

  await store.loadServices();
  if (store.state.gatewayDown) {
    const banner = el("div", { className: "banner-error" },
      `gateway unreachable at ${base} `,
      el("button", { onclick: () => location.reload() }, "retry"));
    sidebar.appendChild(banner);
    return;
  }

  // capability checklist feeding "synthesize from capabilities"
  const capabilities = [...new Set(store.state.services.map((s) => s.capability))]
    .filter((c) => !c.startsWith("face_"))
    .sort();
  const checks: Record<string, HTMLInputElement> = {};
  const checklist = el("fieldset", {},
    el("legend", {}, "capabilities"));
  for (const capability of capabilities) {
    const box = el("input", { type: "checkbox" });
    checks[capability] = box;
    checklist.appendChild(el("label", {}, box, ` ${capability}`));
  }
  const alignBox = el("input", { type: "checkbox" });
  checklist.appendChild(el("label", {}, alignBox, " align faces"));
  sidebar.appendChild(checklist);

  // reference inputs: uploads land in the artifact store, refs feed synthesis
  const uploadedByRole: Record<string, string> = {};
  const uploads = el("fieldset", {}, el("legend", {}, "reference inputs"));
  for (const [role, type] of Object.entries(ROLE_TYPES)) {
    const picker = el("input", { type: "file" });
    picker.addEventListener("change", async () => {
      const file = picker.files?.[0];
      if (!file) return;
      const bytes = new Uint8Array(await file.arrayBuffer());
      uploadedByRole[role] = await client.uploadArtifact(type, bytes);
    });
    uploads.appendChild(el("label", {}, `${role} (${type}) `, picker));
  }
  const promptBox = el("textarea", { rows: 2, placeholder: "background prompt" });
  promptBox.addEventListener("change", async () => {
    if (!promptBox.value) return;
    uploadedByRole["background_spec"] = await client.uploadArtifact(
      "BackgroundSpec", new TextEncoder().encode(promptBox.value));
  });
  uploads.appendChild(el("label", {}, "background_spec ", promptBox));
  sidebar.appendChild(uploads);

  const synthesizeButton = el("button", {}, "synthesize pipeline");
  synthesizeButton.addEventListener("click", async () => {
    const chosen = capabilities.filter((c) => checks[c].checked);
    if (chosen.length === 0) return;
    try {
      await store.synthesizeFromCapabilities({
        capabilities: chosen,
        align_faces: alignBox.checked,
        inputs: uploadedByRole,
      });
    } catch (err) {
      alert(String(err));
    }
  });
  sidebar.appendChild(synthesizeButton);

  const runButton = el("button", { id: "run-button" }, "run");
  runButton.disabled = true;
  store.subscribe(() => {
    runButton.disabled = !store.runnable;
  });
  runButton.addEventListener("click", async () => {
    try {
      await store.launchRun();
    } catch (err) {
      alert(String(err));
    }
  });
  sidebar.appendChild(runButton);

  // reattach to a run after a page reload
  const runParam = new URLSearchParams(location.search).get("run");
  if (runParam) await store.attachRun(runParam);
}

void boot();
