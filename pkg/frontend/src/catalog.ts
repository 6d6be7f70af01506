/** The component catalog: two anonymous components, four login-gated. */

export type ComponentKind = "movable-panel" | "label";

export interface ComponentDescriptor {
  componentId: string;
  title: string;
  requiresAuth: boolean;
  kind: ComponentKind;
}

export const COMPONENT_CATALOG: readonly ComponentDescriptor[] = [
  { componentId: "clock", title: "Clock", requiresAuth: false, kind: "label" },
  { componentId: "calculator", title: "Calculator", requiresAuth: false, kind: "movable-panel" },
  { componentId: "chat", title: "Chat", requiresAuth: true, kind: "movable-panel" },
  { componentId: "notes", title: "Notes", requiresAuth: true, kind: "movable-panel" },
  { componentId: "actionlog", title: "Action Log", requiresAuth: true, kind: "movable-panel" },
  { componentId: "searchgrid", title: "Search Grid", requiresAuth: true, kind: "movable-panel" },
];

export function descriptorFor(componentId: string): ComponentDescriptor | undefined {
  return COMPONENT_CATALOG.find((d) => d.componentId === componentId);
}
