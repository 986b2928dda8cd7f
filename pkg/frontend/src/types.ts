// Wire types mirroring the server's canonical JSON encodings.

export interface RoleCardDto {
  id: string;
  name: string;
  title: string;
  responsibilities: string;
  skills: { name: string; output_schema: string; tool: string }[];
  avatar: string | null;
}

export interface ArtifactDto {
  kind: string;
  body: Record<string, unknown>;
  producer: string;
}

export interface MessageDto {
  id: number;
  speaker: string;
  stage: string;
  kind: "chat" | "artifact" | "image" | "system";
  content: string;
  attachments: string[];
  timestamp: number;
  artifact: ArtifactDto | null;
}

export interface MeetingDto {
  id: string;
  form: { topic: string; description: string; constraints: string[]; quantity: number | null };
  roster: RoleCardDto[];
  stage: string;
  transcript: MessageDto[];
  artifacts: ArtifactDto[];
  pending_user_inputs: number[];
  iteration_count: number;
}

export interface TurnDto {
  message: MessageDto;
  stage_before: string;
  stage_after: string;
  artifact_emitted: string | null;
}

export interface AdvanceResponse {
  turns: TurnDto[];
  budget_exhausted: boolean;
  stage: string;
}

export interface ExportBundle {
  plan_md: string;
  plan_json: MeetingDto;
  images: { name: string; b64: string }[];
}

export const HUMAN_SPEAKER = "HUMAN";
export const COMPLETED_STAGE = "completed";

export const STAGE_LABELS: Record<string, string> = {
  requirement_import: "Requirement Import",
  requirement_analysis: "Requirement Analysis",
  design_proposal: "Design Proposal",
  detailed_design: "Detailed Design",
  evaluation_report: "Evaluation Report",
  output: "Output",
  completed: "Completed",
};

export const STAGE_ORDER = [
  "requirement_import",
  "requirement_analysis",
  "design_proposal",
  "detailed_design",
  "evaluation_report",
  "output",
  "completed",
];
