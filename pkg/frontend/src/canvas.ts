// SVG pipeline composer: service nodes with port sockets, drag-to-connect
// edges, server verdicts rendered inline. Socket layout mirrors each
// service descriptor exactly; nothing about compatibility lives here.

import type { AppStore, CanvasNode } from "./store";
import type { PipelineEdge, ServiceDescriptor } from "./types";

const SVG_NS = "http://www.w3.org/2000/svg";
const NODE_WIDTH = 180;
const ROW_HEIGHT = 22;
const HEADER_HEIGHT = 26;

interface DragState {
  from: { nodeId: string; port: string };
  pointer: { x: number; y: number };
}

export class PipelineCanvas {
  private drag: DragState | null = null;

  constructor(
    readonly svg: SVGSVGElement,
    readonly store: AppStore,
  ) {
    store.subscribe(() => this.render());
    svg.addEventListener("pointermove", (ev) => this.onPointerMove(ev));
    svg.addEventListener("pointerup", () => this.onPointerUp());
    this.render();
  }

  private nodeHeight(descriptor: ServiceDescriptor): number {
    const rows = Math.max(descriptor.inputs.length, descriptor.outputs.length);
    return HEADER_HEIGHT + rows * ROW_HEIGHT + 8;
  }

  private socketPosition(
    node: CanvasNode,
    descriptor: ServiceDescriptor,
    port: string,
    side: "in" | "out",
  ): { x: number; y: number } {
    const ports = side === "in" ? descriptor.inputs : descriptor.outputs;
    const index = Math.max(0, ports.findIndex((p) => p.port === port));
    return {
      x: node.x + (side === "in" ? 0 : NODE_WIDTH),
      y: node.y + HEADER_HEIGHT + index * ROW_HEIGHT + ROW_HEIGHT / 2,
    };
  }

  render(): void {
    const { nodes, edges, lastVerdict, gatewayDown } = this.store.state;
    this.svg.replaceChildren();
    this.svg.classList.toggle("gateway-down", gatewayDown)

    for (const edge of edges) {
      const path = this.edgePath(edge);
      if (path) this.svg.appendChild(path);
    }
    if (this.drag) {
      const node = this.store.state.nodes.find((n) => n.nodeId === this.drag!.from.nodeId);
      const descriptor = node && this.store.service(node.serviceId);
      if (node && descriptor) {
        const from = this.socketPosition(node, descriptor, this.drag.from.port, "out");
        const line = document.createElementNS(SVG_NS, "line");
        line.setAttribute("x1", String(from.x));
        line.setAttribute("y1", String(from.y));
        line.setAttribute("x2", String(this.drag.pointer.x));
        line.setAttribute("y2", String(this.drag.pointer.y));
        line.setAttribute("class", "edge-drag");
        this.svg.appendChild(line);
      }
    }
    for (const node of nodes) this.renderNode(node);

    if (lastVerdict && !lastVerdict.accepted) {
      const note = document.createElementNS(SVG_NS, "text");
      note.setAttribute("x", "12");
      note.setAttribute("y", "16");
      note.setAttribute("class", "edge-rejection");
      note.setAttribute("data-testid", "edge-rejection");
      note.textContent = `edge rejected: ${lastVerdict.code}`;
      this.svg.appendChild(note);
    }
  }

  private edgePath(edge: PipelineEdge): SVGElement | null {
    const fromNode = this.store.state.nodes.find((n) => n.nodeId === edge.from);
    const toNode = this.store.state.nodes.find((n) => n.nodeId === edge.to);
    const fromDesc = fromNode && this.store.service(fromNode.serviceId);
    const toDesc = toNode && this.store.service(toNode.serviceId);
    if (!fromNode || !toNode || !fromDesc || !toDesc) return null;
    const a = this.socketPosition(fromNode, fromDesc, edge.from_port, "out");
    const b = this.socketPosition(toNode, toDesc, edge.to_port, "in");
    const path = document.createElementNS(SVG_NS, "path");
    const dx = Math.max(40, (b.x - a.x) / 2);
    path.setAttribute(
      "d",
      `M ${a.x} ${a.y} C ${a.x + dx} ${a.y}, ${b.x - dx} ${b.y}, ${b.x} ${b.y}`,
    );
    path.setAttribute("class", "edge");
    path.setAttribute("data-edge", `${edge.from}.${edge.from_port}->${edge.to}.${edge.to_port}`);
    return path;
  }

  private renderNode(node: CanvasNode): void {
    const descriptor = this.store.service(node.serviceId);
    if (!descriptor) return;
    const group = document.createElementNS(SVG_NS, "g");
    group.setAttribute("transform", `translate(${node.x}, ${node.y})`);
    group.setAttribute("data-node", node.nodeId);

    const box = document.createElementNS(SVG_NS, "rect");
    box.setAttribute("width", String(NODE_WIDTH));
    box.setAttribute("height", String(this.nodeHeight(descriptor)));
    box.setAttribute("rx", "6");
    box.setAttribute("class", "node-box");
    group.appendChild(box);

    const title = document.createElementNS(SVG_NS, "text");
    title.setAttribute("x", String(NODE_WIDTH / 2));
    title.setAttribute("y", "17");
    title.setAttribute("text-anchor", "middle");
    title.setAttribute("class", "node-title");
    title.textContent = node.nodeId;
    group.appendChild(title);

    descriptor.inputs.forEach((port, i) => {
      group.appendChild(this.renderSocket(node, port.port, port.type, "in", i));
    });
    descriptor.outputs.forEach((port, i) => {
      group.appendChild(this.renderSocket(node, port.port, port.type, "out", i));
    });
    this.svg.appendChild(group);
  }

  private renderSocket(
    node: CanvasNode,
    port: string,
    type: string,
    side: "in" | "out",
    index: number,
  ): SVGElement {
    const group = document.createElementNS(SVG_NS, "g");
    const y = HEADER_HEIGHT + index * ROW_HEIGHT + ROW_HEIGHT / 2;
    const x = side === "in" ? 0 : NODE_WIDTH;

    const dot = document.createElementNS(SVG_NS, "circle");
    dot.setAttribute("cx", String(x));
    dot.setAttribute("cy", String(y));
    dot.setAttribute("r", "5");
    dot.setAttribute("class", `socket socket-${side}`);
    dot.setAttribute("data-socket", `${node.nodeId}.${port}`);
    dot.setAttribute("data-socket-type", type);
    if (side === "out") {
      dot.addEventListener("pointerdown", (ev) => {
        ev.preventDefault();
        this.drag = {
          from: { nodeId: node.nodeId, port },
          pointer: { x: node.x + NODE_WIDTH, y: node.y + y },
        };
        this.render();
      });
    } else {
      dot.addEventListener("pointerup", () => {
        if (!this.drag) return;
        const candidate: PipelineEdge = {
          from: this.drag.from.nodeId,
          from_port: this.drag.from.port,
          to: node.nodeId,
          to_port: port,
        };
        this.drag = null;
        void this.store.tryAddEdge(candidate);
      });
    }
    group.appendChild(dot);

    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(side === "in" ? 10 : NODE_WIDTH - 10));
    label.setAttribute("y", String(y + 4));
    label.setAttribute("text-anchor", side === "in" ? "start" : "end");
    label.setAttribute("class", "socket-label");
    label.textContent = `${port}: ${type}`;
    group.appendChild(label);
    return group;
  }

  private onPointerMove(ev: PointerEvent): void {
    if (!this.drag) return;
    const rect = this.svg.getBoundingClientRect();
    this.drag.pointer = { x: ev.clientX - rect.left, y: ev.clientY - rect.top };
    this.render();
  }

  private onPointerUp(): void {
    if (this.drag) {
      this.drag = null;
      this.render();
    }
  }
}
