/** Minimal virtual-node layer so views are pure data and testable without a DOM. */

export type Handler = (event?: unknown) => void;

export interface VNode {
  tag: string;
  attrs: Record<string, string>;
  children: (VNode | string)[];
  on: Record<string, Handler>;
}

export function h(
  tag: string,
  attrs: Record<string, string> = {},
  children: (VNode | string)[] = [],
  on: Record<string, Handler> = {},
): VNode {
  return { tag, attrs, children, on };
}

export function text(node: VNode): string {
  return node.children.map((c) => (typeof c === "string" ? c : text(c))).join("");
}

/** All text leaves in document order. */
export function texts(node: VNode): string[] {
  const out: string[] = [];
  const walk = (n: VNode | string): void => {
    if (typeof n === "string") {
      if (n.trim()) out.push(n);
      return;
    }
    n.children.forEach(walk);
  };
  walk(node);
  return out;
}

export function findAll(node: VNode, predicate: (n: VNode) => boolean): VNode[] {
  const out: VNode[] = [];
  const walk = (n: VNode | string): void => {
    if (typeof n === "string") return;
    if (predicate(n)) out.push(n);
    n.children.forEach(walk);
  };
  walk(node);
  return out;
}

export function byClass(node: VNode, className: string): VNode[] {
  return findAll(node, (n) => (n.attrs.class ?? "").split(/\s+/).includes(className));
}

const SVG_TAGS = new Set(["svg", "line", "circle", "path", "rect", "g", "text"]);

/** Browser-only: materialize a VNode tree into real DOM under `parent`. */
export function mount(node: VNode, parent: Element): Element {
  const doc = parent.ownerDocument;
  const el = SVG_TAGS.has(node.tag)
    ? doc.createElementNS("http://www.w3.org/2000/svg", node.tag)
    : doc.createElement(node.tag);
  for (const [key, value] of Object.entries(node.attrs)) el.setAttribute(key, value);
  for (const [event, handler] of Object.entries(node.on)) el.addEventListener(event, handler);
  for (const child of node.children) {
    if (typeof child === "string") el.appendChild(doc.createTextNode(child));
    else mount(child, el);
  }
  parent.appendChild(el);
  return el;
}
